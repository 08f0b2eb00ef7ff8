"""Concrete compact groups: T^n (n = 1, 2), SU(2), SO(3).

Provides dual enumeration, unitary representation matrices, and product
quadrature rules realizing the normalized Haar integral exactly on
band-limited functions.

Conventions (fixed here, used consistently everywhere):

* Torus characters are e^{2 pi i k.x} with x in [0,1)^n, so the Laplace
  eigenvalue is lambda^2 = 4 pi^2 |k|^2.  The weight <xi> = (1+lambda^2)^{1/2}
  on every group.  Convergence statements are invariant under the 2 pi
  normalization; absolute symbol values are not.
* SU(2) and SO(3) points are zyz Euler angles (alpha, beta, gamma) with
  beta in [0, pi]; gamma has period 4 pi on SU(2) (half-integer classes)
  and 2 pi on SO(3).  Representation matrices are
  D^l_{mn} = e^{-i m alpha} d^l_{mn}(beta) e^{-i n gamma}, rows and columns
  indexed by m DESCENDING (m = l, l-1, ..., -l), which makes D^{1/2} equal
  to exp(-i alpha sigma3/2) exp(-i beta sigma2/2) exp(-i gamma sigma3/2)
  with the standard Pauli matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CapabilityError, DomainError, NumericError

# Direct factorial-sum evaluation of small-d matrices loses accuracy slowly
# with degree; beyond this cap the alternating sum is not trustworthy.
WIGNER_DEGREE_CAP = 64


@dataclass(frozen=True)
class Irrep:
    """One equivalence class of irreducible unitary representations.

    label is an integer tuple k for T^n, or l (possibly half-integer, stored
    as an exact float) for SU(2)/SO(3).  dim and lambda_sq follow from the
    label; weight = (1 + lambda_sq)^(1/2).
    """

    group: "CompactGroup"
    label: object
    dim: int
    lambda_sq: float

    @property
    def weight(self) -> float:
        return math.sqrt(1.0 + self.lambda_sq)

    @property
    def level(self) -> float:
        """Band-limit level: max|k_i| on the torus, l on SU(2)/SO(3)."""
        return self.group.level_of_label(self.label)

    def matrix(self, x) -> np.ndarray:
        return self.group.represent(self, x)

    def __repr__(self):
        return f"Irrep({self.group.name}, {self.label})"


def rep_eval(irrep: Irrep, x) -> np.ndarray:
    """Unitary d x d representation matrix of irrep at the group point x."""
    return irrep.matrix(x)


def enumerate_dual(group: "CompactGroup", cutoff: float) -> list[Irrep]:
    """All classes with weight <xi> <= cutoff, sorted by (lambda_sq, label)."""
    if cutoff < 1.0:
        raise DomainError(f"dual cutoff must be >= 1 (the trivial class has weight 1), got {cutoff}")
    return group.enumerate_dual(cutoff)


class CompactGroup:
    """Base for the concrete groups; instances are stateless singletons."""

    name: str
    dim: int
    # number of classes with weight <= L grows like L**dual_growth_exponent
    dual_growth_exponent: int

    def enumerate_dual(self, cutoff: float) -> list[Irrep]:
        raise NotImplementedError

    def irrep(self, label) -> Irrep:
        raise NotImplementedError

    def level_of_label(self, label) -> float:
        raise NotImplementedError

    def max_level(self, cutoff: float) -> float:
        """Largest band-limit level among classes with weight <= cutoff."""
        raise NotImplementedError

    def weight_of_level(self, level: float) -> float:
        """Weight of the classes at a given level (monotone in the level)."""
        raise NotImplementedError

    def represent(self, irrep: Irrep, x) -> np.ndarray:
        raise NotImplementedError

    def quadrature(self, level: float) -> "QuadratureRule":
        raise NotImplementedError

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self):
        return self.name


class Torus(CompactGroup):
    def __init__(self, n: int):
        if n < 1:
            raise DomainError("torus dimension must be positive")
        self.n = n
        self.name = f"t{n}"
        self.dim = n
        self.dual_growth_exponent = n

    def irrep(self, label) -> Irrep:
        k = tuple(int(c) for c in np.atleast_1d(label))
        if len(k) != self.n:
            raise DomainError(f"torus label must have {self.n} components, got {label!r}")
        lam2 = 4.0 * math.pi ** 2 * float(sum(c * c for c in k))
        return Irrep(self, k, 1, lam2)

    def level_of_label(self, label) -> float:
        return float(max(abs(c) for c in label))

    def max_level(self, cutoff: float) -> float:
        return float(self._kmax(cutoff))

    def weight_of_level(self, level: float) -> float:
        return math.sqrt(1.0 + 4.0 * math.pi ** 2 * level ** 2)

    def _kmax(self, cutoff: float) -> int:
        if cutoff < 1.0:
            return -1
        return int(math.floor(math.sqrt(cutoff * cutoff - 1.0) / (2.0 * math.pi) + 1e-12))

    def enumerate_dual(self, cutoff: float) -> list[Irrep]:
        kmax = self._kmax(cutoff)
        r2 = (cutoff * cutoff - 1.0) / (4.0 * math.pi ** 2) + 1e-12
        labels = []
        for k in np.ndindex(*((2 * kmax + 1,) * self.n)):
            kk = tuple(int(c) - kmax for c in k)
            if sum(c * c for c in kk) <= r2:
                labels.append(kk)
        labels.sort(key=lambda kk: (sum(c * c for c in kk), kk))
        return [self.irrep(kk) for kk in labels]

    def dual_labels_vectorized(self, cutoff: float) -> np.ndarray:
        """T^1 only: labels in dual order as an int array, without Irrep objects."""
        if self.n != 1:
            raise CapabilityError("vectorized dual enumeration is implemented for T^1 only")
        kmax = self._kmax(cutoff)
        k = np.arange(-kmax, kmax + 1)
        order = np.lexsort((k, k * k))
        return k[order]

    def represent(self, irrep: Irrep, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(self.n)
        phase = 2.0 * math.pi * float(np.dot(irrep.label, x))
        return np.array([[complex(math.cos(phase), math.sin(phase))]])

    def quadrature(self, level: float) -> "QuadratureRule":
        if level < 0:
            raise DomainError("quadrature level must be >= 0")
        m = int(math.ceil(2.0 * level)) + 2
        grid = np.arange(m) / m
        axes = [grid] * self.n
        mesh = np.meshgrid(*axes, indexing="ij")
        nodes = np.stack([g.ravel() for g in mesh], axis=-1)
        weights = np.full(nodes.shape[0], 1.0 / m ** self.n)
        return QuadratureRule(self, float(level), nodes, weights, _torus_grid=grid)

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        return rng.random(self.n)


def _half_int_str(two_l: int) -> str:
    return str(two_l // 2) if two_l % 2 == 0 else f"{two_l}/2"


@lru_cache(maxsize=4096)
def _wigner_d_cached(two_l: int, beta: float) -> np.ndarray:
    mat = _wigner_d_raw(two_l, beta)
    mat.setflags(write=False)
    return mat


def _wigner_d_raw(two_l: int, beta: float) -> np.ndarray:
    # Explicit factorial sum with log-factorials and sign tracking.
    # beta in [0, pi] so cos(beta/2), sin(beta/2) >= 0 and 0**0 == 1.0 is safe.
    d = two_l + 1
    c = math.cos(beta / 2.0)
    s = math.sin(beta / 2.0)
    lg = math.lgamma
    out = np.empty((d, d))
    for i in range(d):
        two_m = two_l - 2 * i
        lpm = (two_l + two_m) // 2
        lmm = (two_l - two_m) // 2
        for j in range(d):
            two_n = two_l - 2 * j
            lpn = (two_l + two_n) // 2
            lmn = (two_l - two_n) // 2
            mn = (two_m - two_n) // 2  # m - n, always an integer
            pref = 0.5 * (lg(lpm + 1) + lg(lmm + 1) + lg(lpn + 1) + lg(lmn + 1))
            acc = 0.0
            for k in range(max(0, -mn), min(lpn, lmm) + 1):
                term = math.exp(
                    pref - lg(lpn - k + 1) - lg(k + 1) - lg(mn + k + 1) - lg(lmm - k + 1)
                )
                term *= c ** (two_l - 2 * k - mn) * s ** (mn + 2 * k)
                acc += -term if (mn + k) % 2 else term
            out[i, j] = acc
    return out


def wigner_d_matrix(l: float, beta: float) -> np.ndarray:
    """Real Wigner d^l(beta) matrix, rows/columns ordered by m descending."""
    two_l = int(round(2 * l))
    if abs(2 * l - two_l) > 1e-12 or two_l < 0:
        raise DomainError(f"degree must be a nonnegative half-integer, got {l}")
    if l > WIGNER_DEGREE_CAP:
        raise CapabilityError(
            f"degree {l} exceeds the stable evaluation cap {WIGNER_DEGREE_CAP} "
            "for the direct factorial-sum formula"
        )
    return _wigner_d_cached(two_l, float(beta))


class _EulerAngleGroup(CompactGroup):
    """Shared machinery for SU(2) and SO(3) in zyz Euler angles."""

    gamma_period: float
    half_integers: bool

    def irrep_from_two_l(self, two_l: int) -> Irrep:
        lam2 = two_l * (two_l + 2) / 4.0  # l(l+1), exact in floats for desk scales
        return Irrep(self, two_l / 2.0, two_l + 1, lam2)

    def irrep(self, label) -> Irrep:
        two_l = int(round(2 * float(label)))
        if two_l < 0 or abs(2 * float(label) - two_l) > 1e-12:
            raise DomainError(f"label must be a nonnegative half-integer, got {label!r}")
        if not self.half_integers and two_l % 2:
            raise DomainError(f"{self.name} classes are labelled by integers, got {label!r}")
        return self.irrep_from_two_l(two_l)

    def level_of_label(self, label) -> float:
        return float(label)

    def max_level(self, cutoff: float) -> float:
        # largest l with l(l+1) <= cutoff^2 - 1
        if cutoff < 1.0:
            return -1.0
        l_real = 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * (cutoff * cutoff - 1.0) + 1e-12))
        step = 1 if self.half_integers else 2
        two_l = int(math.floor(2.0 * l_real + 1e-9))
        two_l -= two_l % step
        return max(two_l, 0) / 2.0

    def weight_of_level(self, level: float) -> float:
        return math.sqrt(1.0 + level * (level + 1.0))

    def enumerate_dual(self, cutoff: float) -> list[Irrep]:
        step = 1 if self.half_integers else 2
        out = []
        two_l = 0
        while two_l * (two_l + 2) / 4.0 <= cutoff * cutoff - 1.0 + 1e-12:
            out.append(self.irrep_from_two_l(two_l))
            two_l += step
        return out

    def represent(self, irrep: Irrep, x) -> np.ndarray:
        alpha, beta, gamma = (float(c) for c in np.asarray(x, dtype=float).reshape(3))
        dm = wigner_d_matrix(irrep.label, beta)
        ms = (int(round(2 * irrep.label)) - 2 * np.arange(irrep.dim)) / 2.0
        ea = np.exp(-1j * ms * alpha)
        eg = np.exp(-1j * ms * gamma)
        return ea[:, None] * dm * eg[None, :]

    def quadrature(self, level: float) -> "QuadratureRule":
        if level < 0:
            raise DomainError("quadrature level must be >= 0")
        na = int(math.ceil(4.0 * level)) + 2
        ng = int(math.ceil(4.0 * level)) + 2
        nb = int(math.ceil(2.0 * level)) + 2
        alphas = 2.0 * math.pi * np.arange(na) / na
        gammas = self.gamma_period * np.arange(ng) / ng
        t, glw = np.polynomial.legendre.leggauss(nb)
        betas = np.arccos(t)
        # node layout: alpha outer, beta middle, gamma inner
        nodes = np.empty((na * nb * ng, 3))
        weights = np.empty(na * nb * ng)
        idx = 0
        for ia in range(na):
            for ib in range(nb):
                w = glw[ib] / (2.0 * na * ng)
                for ig in range(ng):
                    nodes[idx, 0] = alphas[ia]
                    nodes[idx, 1] = betas[ib]
                    nodes[idx, 2] = gammas[ig]
                    weights[idx] = w
                    idx += 1
        return QuadratureRule(
            self, float(level), nodes, weights,
            _euler_grids=(alphas, betas, gammas),
        )

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        return np.array([
            rng.uniform(0.0, 2.0 * math.pi),
            math.acos(rng.uniform(-1.0, 1.0)),
            rng.uniform(0.0, self.gamma_period),
        ])


class SpecialUnitary2(_EulerAngleGroup):
    def __init__(self):
        self.name = "su2"
        self.dim = 3
        self.dual_growth_exponent = 1
        self.gamma_period = 4.0 * math.pi
        self.half_integers = True


class Rotations3(_EulerAngleGroup):
    def __init__(self):
        self.name = "so3"
        self.dim = 3
        self.dual_growth_exponent = 1
        self.gamma_period = 2.0 * math.pi
        self.half_integers = False


T1 = Torus(1)
T2 = Torus(2)
SU2 = SpecialUnitary2()
SO3 = Rotations3()

GROUPS = {g.name: g for g in (T1, T2, SU2, SO3)}


class QuadratureRule:
    """Nodes and positive weights realizing the normalized Haar integral.

    Exact (to roundoff) for products xi_ij * conj(xi'_kl) whenever both
    classes have level <= exactness_level.  Immutable after construction;
    representation evaluations at the nodes are memoized.
    """

    def __init__(self, group, exactness_level, nodes, weights,
                 _torus_grid=None, _euler_grids=None):
        self.group = group
        self.exactness_level = exactness_level
        self.nodes = nodes
        self.weights = weights
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)
        self._torus_grid = _torus_grid
        self._euler_grids = _euler_grids
        self._rep_cache: dict[Irrep, np.ndarray] = {}

    def __len__(self):
        return self.nodes.shape[0]

    def integrate_values(self, values: np.ndarray) -> complex:
        """Weighted sum in fixed node order (bit-reproducible at fixed input)."""
        return complex(np.dot(self.weights, np.asarray(values)))

    def eval_irrep(self, irrep: Irrep) -> np.ndarray:
        """All representation matrices at the nodes, shape (n_nodes, d, d)."""
        cached = self._rep_cache.get(irrep)
        if cached is not None:
            return cached
        if isinstance(self.group, Torus):
            phases = 2.0 * math.pi * (self.nodes @ np.asarray(irrep.label, dtype=float))
            mats = np.exp(1j * phases).reshape(-1, 1, 1)
        else:
            alphas, betas, gammas = self._euler_grids
            dim = irrep.dim
            ms = (int(round(2 * irrep.label)) - 2 * np.arange(dim)) / 2.0
            dmats = np.stack([wigner_d_matrix(irrep.label, b) for b in betas])
            ea = np.exp(-1j * np.outer(alphas, ms))   # (na, d)
            eg = np.exp(-1j * np.outer(gammas, ms))   # (ng, d)
            mats = np.einsum("am,bmn,gn->abgmn", ea, dmats, eg, optimize=True)
            mats = mats.reshape(-1, dim, dim)
        mats.setflags(write=False)
        self._rep_cache[irrep] = mats
        return mats


def quadrature(group: CompactGroup, level: float) -> QuadratureRule:
    """Product Haar quadrature exact on coefficient products up to the level."""
    return group.quadrature(level)


def integrate(rule: QuadratureRule, f) -> complex:
    """Sum w_i f(x_i) in fixed node order; f is a callable on group points."""
    values = np.empty(len(rule), dtype=complex)
    for i, x in enumerate(rule.nodes):
        v = complex(f(x))
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise NumericError(f"integrand non-finite at node {i}", node_index=i)
        values[i] = v
    return rule.integrate_values(values)
