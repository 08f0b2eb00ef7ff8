"""Forward and inverse group Fourier transform and the Parseval identity.

Coefficient convention: fhat(xi)_{mn} = int f(x) (xi(x)*)_{mn} dx, i.e. the
forward transform contracts against the conjugate transpose of the
representation matrix, so the inversion series
f(x) = sum_xi d_xi Tr(xi(x) fhat(xi)) reproduces f without transposition.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ExactnessWarning
from .groups import CompactGroup, Irrep, QuadratureRule, enumerate_dual


@dataclass
class GridFunction:
    """A function known by its values at a quadrature rule's nodes.

    band_limit, when declared, is the largest representation level carrying
    nonzero coefficients; transforms use it to certify exactness.
    """

    rule: QuadratureRule
    values: np.ndarray
    band_limit: float | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (len(self.rule),):
            raise DomainError(
                f"need one value per node ({len(self.rule)}), got shape {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise DomainError("grid function values must be finite")

    @property
    def group(self) -> CompactGroup:
        return self.rule.group

    def l2_norm(self) -> float:
        return float(np.dot(self.rule.weights, np.abs(self.values) ** 2)) ** 0.5


def grid_function(rule: QuadratureRule, f, band_limit=None) -> GridFunction:
    """Sample a callable on the rule's nodes."""
    vals = np.array([f(x) for x in rule.nodes], dtype=complex)
    return GridFunction(rule, vals, band_limit)


@dataclass
class FourierCoefficients:
    """Mapping irrep -> d x d coefficient matrix, at a finite weight cutoff."""

    group: CompactGroup
    entries: dict[Irrep, np.ndarray]
    cutoff: float
    exactness_certified: bool = True
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        for xi, mat in self.entries.items():
            mat = np.asarray(mat, dtype=complex)
            if mat.shape != (xi.dim, xi.dim):
                raise DomainError(f"entry for {xi} must be {xi.dim}x{xi.dim}, got {mat.shape}")
            self.entries[xi] = mat

    def matrix(self, xi: Irrep) -> np.ndarray:
        mat = self.entries.get(xi)
        if mat is None:
            return np.zeros((xi.dim, xi.dim), dtype=complex)
        return mat

    def l2_norm(self) -> float:
        """ell^2(dual) norm (sum d ||.||_HS^2)^(1/2)."""
        total = 0.0
        for xi, mat in self.entries.items():
            total += xi.dim * float(np.linalg.norm(mat)) ** 2
        return total ** 0.5

    def to_jsonable(self) -> dict:
        items = []
        for xi, mat in self.entries.items():
            items.append({
                "label": list(xi.label) if isinstance(xi.label, tuple) else xi.label,
                "dim": xi.dim,
                "re": [[float(v) for v in row] for row in mat.real],
                "im": [[float(v) for v in row] for row in mat.imag],
            })
        return {"group": self.group.name, "cutoff": self.cutoff, "entries": items}

    @staticmethod
    def from_jsonable(data: dict, groups=None) -> "FourierCoefficients":
        from .groups import GROUPS

        group = (groups or GROUPS)[data["group"]]
        entries = {}
        for item in data["entries"]:
            label = tuple(item["label"]) if isinstance(item["label"], list) else item["label"]
            xi = group.irrep(label)
            entries[xi] = np.array(item["re"], dtype=float) + 1j * np.array(item["im"], dtype=float)
        return FourierCoefficients(group, entries, data["cutoff"])


def _check_exactness(rule: QuadratureRule, duals, band_limit, what: str):
    max_level = max((xi.level for xi in duals), default=0.0)
    if band_limit is None:
        certified = max_level <= rule.exactness_level
        detail = f"requested level {max_level} exceeds rule level {rule.exactness_level}"
    else:
        certified = max_level + band_limit <= 2.0 * rule.exactness_level
        detail = (
            f"level {max_level} + band limit {band_limit} exceeds "
            f"2 x rule level {rule.exactness_level}"
        )
    if not certified:
        warnings.warn(f"{what}: exactness not certified ({detail})", ExactnessWarning, stacklevel=3)
    return certified


def forward_ft(f: GridFunction, duals: list[Irrep]) -> FourierCoefficients:
    """fhat(xi) = sum_i w_i f(x_i) xi(x_i)*, per requested class."""
    rule = f.rule
    certified = _check_exactness(rule, duals, f.band_limit, "forward_ft")
    wf = rule.weights * f.values
    entries = {}
    for xi in duals:
        mats = rule.eval_irrep(xi)  # (n, d, d)
        entries[xi] = np.einsum("n,nji->ij", wf, mats.conj(), optimize=True)
    cutoff = max((xi.weight for xi in duals), default=1.0)
    out = FourierCoefficients(f.group, entries, cutoff, exactness_certified=certified)
    if not certified:
        out.notes.append("exactness shortfall in forward transform")
    return out


def inverse_ft(coeffs: FourierCoefficients, x) -> complex:
    """Truncated inversion series sum_xi d Tr(xi(x) fhat(xi)) at one point."""
    total = 0.0 + 0.0j
    for xi, mat in coeffs.entries.items():
        total += xi.dim * np.trace(xi.matrix(x) @ mat)
    return complex(total)


def inverse_ft_grid(coeffs: FourierCoefficients, rule: QuadratureRule,
                    band_limit=None) -> GridFunction:
    """Inversion series evaluated at every node of a rule."""
    values = np.zeros(len(rule), dtype=complex)
    max_level = 0.0
    for xi, mat in coeffs.entries.items():
        mats = rule.eval_irrep(xi)
        values += xi.dim * np.einsum("nij,ji->n", mats, mat, optimize=True)
        max_level = max(max_level, xi.level)
    if band_limit is None:
        band_limit = max_level
    return GridFunction(rule, values, band_limit=band_limit)


def parseval_defect(f: GridFunction, coeffs: FourierCoefficients) -> float:
    """| ||f||_L2^2 - sum_xi d ||fhat(xi)||_HS^2 |, near zero for band-limited f."""
    lhs = f.l2_norm() ** 2
    rhs = coeffs.l2_norm() ** 2
    return abs(lhs - rhs)


def random_band_limited(rule: QuadratureRule, level: float,
                        rng: np.random.Generator, scale: float = 1.0) -> GridFunction:
    """Random function with coefficients supported on classes of level <= level."""
    group = rule.group
    cutoff = group.weight_of_level(level) + 1e-9
    duals = enumerate_dual(group, cutoff)
    entries = {}
    for xi in duals:
        re = rng.standard_normal((xi.dim, xi.dim))
        im = rng.standard_normal((xi.dim, xi.dim))
        entries[xi] = scale * (re + 1j * im) / xi.dim
    coeffs = FourierCoefficients(group, entries, cutoff)
    return inverse_ft_grid(coeffs, rule, band_limit=level)
