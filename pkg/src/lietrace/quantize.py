"""Matrix-valued symbols and the global quantization.

A symbol assigns to each (x, xi) a d_xi x d_xi matrix; the associated
operator acts by  Af(x) = sum_xi d_xi Tr(xi(x) sigma(x, xi) fhat(xi)).
Invariant symbols do not depend on x and generate left-invariant operators.

Symbols with genuine x-dependence (separable, general) are stored sampled at
the nodes of a quadrature rule; x-arguments for those kinds are node indices.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExactnessWarning, NumericError
from .fourier import FourierCoefficients, GridFunction, forward_ft
from .groups import CompactGroup, Irrep, QuadratureRule, enumerate_dual


class Symbol:
    """Base class; see InvariantSymbol, DiagonalSymbol, SeparableSymbol,
    GeneralSymbol."""

    kind: str
    group: CompactGroup
    cutoff: float | None
    x_dependent: bool
    rule: QuadratureRule | None = None

    def value(self, xi: Irrep, node: int | None = None) -> np.ndarray:
        raise NotImplementedError

    def duals(self, cutoff=None) -> list[Irrep]:
        cutoff = cutoff if cutoff is not None else self.cutoff
        if cutoff is None:
            raise DomainError("symbol has no cutoff; pass one explicitly")
        return enumerate_dual(self.group, cutoff)

    def scaled(self, factor: complex) -> "Symbol":
        raise NotImplementedError


class InvariantSymbol(Symbol):
    """x-independent symbol: mapping irrep -> matrix.

    Backed by a dict (finite, serializable) or by a callable (for deep
    cutoffs where materializing every class is wasteful).  On the torus an
    optional vectorized scalar evaluator (labels array -> values) unlocks the
    criterion evaluators' bulk path.
    """

    kind = "invariant"
    x_dependent = False

    def __init__(self, group, entries=None, fn=None, cutoff=None, scalar_fn=None):
        if (entries is None) == (fn is None):
            raise DomainError("provide exactly one of entries / fn")
        self.group = group
        self.cutoff = cutoff
        self._fn = fn
        self._scalar_fn = scalar_fn
        if entries is not None:
            checked = {}
            for xi, mat in entries.items():
                mat = np.asarray(mat, dtype=complex)
                if mat.shape != (xi.dim, xi.dim):
                    raise DomainError(f"entry for {xi} must be {xi.dim}x{xi.dim}")
                checked[xi] = mat
            self._table = checked
            if cutoff is None and checked:
                self.cutoff = max(xi.weight for xi in checked)
        else:
            self._table = None

    def value(self, xi: Irrep, node=None) -> np.ndarray:
        if self._table is not None:
            mat = self._table.get(xi)
            return mat if mat is not None else np.zeros((xi.dim, xi.dim), dtype=complex)
        return np.asarray(self._fn(xi), dtype=complex)

    def scalar_values(self, labels: np.ndarray):
        """Vectorized values for torus labels; None when unavailable."""
        if self._scalar_fn is None:
            return None
        return np.asarray(self._scalar_fn(labels), dtype=complex)

    def scaled(self, factor):
        if self._table is not None:
            return InvariantSymbol(
                self.group, entries={xi: factor * m for xi, m in self._table.items()},
                cutoff=self.cutoff)
        fn = self._fn
        sf = self._scalar_fn
        return InvariantSymbol(
            self.group, fn=lambda xi: factor * fn(xi), cutoff=self.cutoff,
            scalar_fn=(None if sf is None else (lambda ks: factor * sf(ks))))

    def to_jsonable(self, cutoff=None) -> dict:
        items = []
        for xi in self.duals(cutoff):
            mat = self.value(xi)
            items.append(_entry_jsonable(xi, mat))
        return {"kind": self.kind, "group": self.group.name,
                "cutoff": cutoff if cutoff is not None else self.cutoff, "entries": items}


class DiagonalSymbol(Symbol):
    """Invariant symbol whose matrices are diagonal; stores length-d vectors."""

    kind = "diagonal"
    x_dependent = False

    def __init__(self, group, entries=None, fn=None, cutoff=None, scalar_fn=None):
        if (entries is None) == (fn is None):
            raise DomainError("provide exactly one of entries / fn")
        self.group = group
        self.cutoff = cutoff
        self._fn = fn
        self._scalar_fn = scalar_fn
        if entries is not None:
            checked = {}
            for xi, vec in entries.items():
                vec = np.asarray(vec, dtype=complex).reshape(-1)
                if vec.shape != (xi.dim,):
                    raise DomainError(f"diagonal for {xi} must have length {xi.dim}")
                checked[xi] = vec
            self._table = checked
            if cutoff is None and checked:
                self.cutoff = max(xi.weight for xi in checked)
        else:
            self._table = None

    def diagonal(self, xi: Irrep) -> np.ndarray:
        if self._table is not None:
            vec = self._table.get(xi)
            return vec if vec is not None else np.zeros(xi.dim, dtype=complex)
        return np.asarray(self._fn(xi), dtype=complex).reshape(-1)

    def value(self, xi: Irrep, node=None) -> np.ndarray:
        return np.diag(self.diagonal(xi))

    def scalar_values(self, labels: np.ndarray):
        if self._scalar_fn is None:
            return None
        return np.asarray(self._scalar_fn(labels), dtype=complex)

    def scaled(self, factor):
        if self._table is not None:
            return DiagonalSymbol(
                self.group, entries={xi: factor * v for xi, v in self._table.items()},
                cutoff=self.cutoff)
        fn = self._fn
        return DiagonalSymbol(self.group, fn=lambda xi: factor * fn(xi), cutoff=self.cutoff)

    def to_jsonable(self, cutoff=None) -> dict:
        items = []
        for xi in self.duals(cutoff):
            vec = self.diagonal(xi)
            items.append({
                "label": _label_jsonable(xi), "dim": xi.dim,
                "re": [float(v) for v in vec.real],
                "im": [float(v) for v in vec.imag],
            })
        return {"kind": self.kind, "group": self.group.name,
                "cutoff": cutoff if cutoff is not None else self.cutoff, "entries": items}


class SeparableSymbol(Symbol):
    """sigma(x, xi) = g(x) a(xi) with g sampled on a rule and a invariant."""

    kind = "separable"
    x_dependent = True

    def __init__(self, g: GridFunction, a: InvariantSymbol | DiagonalSymbol):
        if g.group is not a.group:
            raise DomainError("separable factors must live on the same group")
        self.group = g.group
        self.g = g
        self.a = a
        self.rule = g.rule
        self.cutoff = a.cutoff

    def value(self, xi: Irrep, node=None) -> np.ndarray:
        if node is None:
            raise DomainError("x-dependent symbol needs a node index")
        return self.g.values[node] * self.a.value(xi)

    def scaled(self, factor):
        return SeparableSymbol(self.g, self.a.scaled(factor))

    def to_jsonable(self, cutoff=None) -> dict:
        return {
            "kind": self.kind, "group": self.group.name,
            "cutoff": cutoff if cutoff is not None else self.cutoff,
            "g": {
                "re": [float(v) for v in self.g.values.real],
                "im": [float(v) for v in self.g.values.imag],
                "band_limit": self.g.band_limit,
            },
            "a": self.a.to_jsonable(cutoff),
        }


class GeneralSymbol(Symbol):
    """Fully general symbol sampled at quadrature nodes: (node, xi) -> matrix."""

    kind = "general"
    x_dependent = True

    def __init__(self, group, rule: QuadratureRule, samples=None, fn=None, cutoff=None):
        if (samples is None) == (fn is None):
            raise DomainError("provide exactly one of samples / fn")
        self.group = group
        self.rule = rule
        self.cutoff = cutoff
        self._fn = fn
        if samples is not None:
            checked = {}
            for xi, arr in samples.items():
                arr = np.asarray(arr, dtype=complex)
                if arr.shape != (len(rule), xi.dim, xi.dim):
                    raise DomainError(
                        f"samples for {xi} must have shape ({len(rule)}, {xi.dim}, {xi.dim})")
                checked[xi] = arr
            self._samples = checked
            if cutoff is None and checked:
                self.cutoff = max(xi.weight for xi in checked)
        else:
            self._samples = None

    def values_all(self, xi: Irrep) -> np.ndarray:
        """Samples at every node, shape (n_nodes, d, d)."""
        if self._samples is not None:
            arr = self._samples.get(xi)
            if arr is None:
                return np.zeros((len(self.rule), xi.dim, xi.dim), dtype=complex)
            return arr
        return np.stack([np.asarray(self._fn(n, xi), dtype=complex)
                         for n in range(len(self.rule))])

    def value(self, xi: Irrep, node=None) -> np.ndarray:
        if node is None:
            raise DomainError("x-dependent symbol needs a node index")
        if self._samples is not None:
            return self.values_all(xi)[node]
        return np.asarray(self._fn(node, xi), dtype=complex)

    def scaled(self, factor):
        if self._samples is not None:
            return GeneralSymbol(
                self.group, self.rule,
                samples={xi: factor * a for xi, a in self._samples.items()},
                cutoff=self.cutoff)
        fn = self._fn
        return GeneralSymbol(self.group, self.rule,
                             fn=lambda n, xi: factor * fn(n, xi), cutoff=self.cutoff)

    def to_jsonable(self, cutoff=None) -> dict:
        items = []
        for xi in self.duals(cutoff):
            arr = self.values_all(xi)
            items.append({
                "label": _label_jsonable(xi), "dim": xi.dim,
                "re": [[[float(v) for v in row] for row in m] for m in arr.real],
                "im": [[[float(v) for v in row] for row in m] for m in arr.imag],
            })
        return {"kind": self.kind, "group": self.group.name,
                "cutoff": cutoff if cutoff is not None else self.cutoff,
                "n_nodes": len(self.rule), "entries": items}


def _label_jsonable(xi: Irrep):
    return list(xi.label) if isinstance(xi.label, tuple) else xi.label


def _entry_jsonable(xi: Irrep, mat: np.ndarray) -> dict:
    return {
        "label": _label_jsonable(xi), "dim": xi.dim,
        "re": [[float(v) for v in row] for row in mat.real],
        "im": [[float(v) for v in row] for row in mat.imag],
    }


def symbol_from_jsonable(data: dict, rule: QuadratureRule | None = None) -> Symbol:
    from .groups import GROUPS

    group = GROUPS[data["group"]]
    kind = data["kind"]
    if kind == "invariant":
        entries = {}
        for item in data["entries"]:
            xi = _irrep_from_item(group, item)
            entries[xi] = np.array(item["re"], float) + 1j * np.array(item["im"], float)
        return InvariantSymbol(group, entries=entries, cutoff=data.get("cutoff"))
    if kind == "diagonal":
        entries = {}
        for item in data["entries"]:
            xi = _irrep_from_item(group, item)
            entries[xi] = np.array(item["re"], float) + 1j * np.array(item["im"], float)
        return DiagonalSymbol(group, entries=entries, cutoff=data.get("cutoff"))
    if kind == "separable":
        if rule is None:
            raise DomainError("deserializing a separable symbol needs its quadrature rule")
        g = GridFunction(
            rule,
            np.array(data["g"]["re"], float) + 1j * np.array(data["g"]["im"], float),
            band_limit=data["g"].get("band_limit"),
        )
        a = symbol_from_jsonable(data["a"])
        return SeparableSymbol(g, a)
    if kind == "general":
        if rule is None:
            raise DomainError("deserializing a general symbol needs its quadrature rule")
        samples = {}
        for item in data["entries"]:
            xi = _irrep_from_item(group, item)
            samples[xi] = np.array(item["re"], float) + 1j * np.array(item["im"], float)
        return GeneralSymbol(group, rule, samples=samples, cutoff=data.get("cutoff"))
    raise DomainError(f"unknown symbol kind {kind!r}")


def _irrep_from_item(group, item):
    label = tuple(item["label"]) if isinstance(item["label"], list) else item["label"]
    return group.irrep(label)


# ---------------------------------------------------------------------------
# quantization


def _symbol_values_on_rule(sigma: Symbol, xi: Irrep, rule: QuadratureRule):
    """Symbol samples at every node as (n, d, d), or a (d, d) matrix when
    x-independent (the caller broadcasts)."""
    if not sigma.x_dependent:
        return sigma.value(xi)
    if sigma.rule is not rule:
        raise DomainError("x-dependent symbol is sampled on a different rule")
    if isinstance(sigma, SeparableSymbol):
        return sigma.g.values[:, None, None] * sigma.a.value(xi)
    return sigma.values_all(xi)


def apply_op(sigma: Symbol, f, cutoff: float | None = None) -> GridFunction:
    """Evaluate the quantization series of sigma on f at every node.

    f may be a GridFunction (transformed first) or FourierCoefficients.
    """
    cutoff = cutoff if cutoff is not None else sigma.cutoff
    if cutoff is None:
        raise DomainError("no cutoff available for apply_op")
    duals = enumerate_dual(sigma.group, cutoff)

    if isinstance(f, FourierCoefficients):
        if f.group is not sigma.group:
            raise DomainError("operator and argument live on different groups")
        for xi in f.entries:
            if xi.weight > cutoff + 1e-12:
                raise DomainError(
                    f"coefficient cutoff mismatch: class {xi.label} has weight "
                    f"{xi.weight:.6g} beyond the operator cutoff {cutoff:.6g}")
        if sigma.rule is None:
            raise DomainError("apply_op on coefficients needs the symbol to carry a rule; "
                              "pass a GridFunction instead")
        rule = sigma.rule
        coeffs = f
        band = max((xi.level for xi in f.entries), default=0.0)
    else:
        rule = f.rule
        coeffs = forward_ft(f, duals)
        band = f.band_limit if f.band_limit is not None else rule.exactness_level

    values = np.zeros(len(rule), dtype=complex)
    for xi in duals:
        fh = coeffs.matrix(xi)
        if not fh.any():
            continue
        mats = rule.eval_irrep(xi)
        sv = _symbol_values_on_rule(sigma, xi, rule)
        if sv.ndim == 2:
            values += xi.dim * np.einsum("nij,jk,ki->n", mats, sv, fh, optimize=True)
        else:
            values += xi.dim * np.einsum("nij,njk,ki->n", mats, sv, fh, optimize=True)
    out_band = None
    if band is not None:
        g_band = sigma.g.band_limit if isinstance(sigma, SeparableSymbol) else 0.0
        if g_band is not None and not sigma.x_dependent:
            out_band = band
        elif g_band is not None and isinstance(sigma, SeparableSymbol):
            out_band = band + g_band
    return GridFunction(rule, values, band_limit=out_band)


def kernel_eval(sigma: Symbol, x, y, cutoff: float | None = None) -> complex:
    """Truncated Schwartz kernel k(x, y) = sum_xi d Tr(xi(x) sigma(x, xi) xi(y)*).

    For x-dependent symbols, x must be a node index of the symbol's rule;
    y may be any group point (or a node index).
    """
    cutoff = cutoff if cutoff is not None else sigma.cutoff
    if cutoff is None:
        raise DomainError("no cutoff available for kernel_eval")
    duals = enumerate_dual(sigma.group, cutoff)

    node = None
    if sigma.x_dependent:
        if not isinstance(x, (int, np.integer)):
            raise DomainError("x-dependent symbols evaluate kernels at node indices")
        node = int(x)
        x_pt = sigma.rule.nodes[node]
    else:
        x_pt = sigma.rule.nodes[int(x)] if isinstance(x, (int, np.integer)) and sigma.rule else x
    if isinstance(y, (int, np.integer)):
        if sigma.rule is None:
            raise DomainError("node-index y needs the symbol to carry a rule")
        y_pt = sigma.rule.nodes[int(y)]
    else:
        y_pt = y

    total = 0.0 + 0.0j
    for xi in duals:
        mat_x = xi.matrix(x_pt)
        mat_y = xi.matrix(y_pt)
        sv = sigma.value(xi, node)
        total += xi.dim * np.trace(mat_x @ sv @ mat_y.conj().T)
    return complex(total)


def extract_symbol(a_op, xi: Irrep, node: int, rule: QuadratureRule) -> np.ndarray:
    """Recover sigma_A(x, xi) = xi(x)* (A xi)(x) at the node, applying the
    operator a_op (GridFunction -> GridFunction) to each coefficient function."""
    mats = rule.eval_irrep(xi)
    d = xi.dim
    a_of_xi = np.empty((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            col = a_op(GridFunction(rule, mats[:, i, j], band_limit=xi.level))
            v = complex(col.values[node])
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                raise NumericError(f"operator returned non-finite value at node {node}",
                                   node_index=node)
            a_of_xi[i, j] = v
    return mats[node].conj().T @ a_of_xi


@dataclass
class TruncatedOperator:
    """Dense matrix of an operator on the orthonormal basis {sqrt(d) xi_ij}
    restricted to classes with weight <= cutoff.

    Basis order: classes in dual order, then (i, j) pairs with i fastest
    (column index j outer), so invariant symbols appear as kron(sigma, I_d)
    blocks whose eigenvalues are those of sigma with multiplicity d.
    """

    group: CompactGroup
    cutoff: float
    matrix: np.ndarray
    basis: list[tuple[Irrep, int, int]]

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def basis_index(self, xi: Irrep, i: int, j: int) -> int:
        offset = 0
        for cand in dict.fromkeys(b[0] for b in self.basis):
            if cand == xi:
                return offset + j * xi.dim + i
            offset += cand.dim ** 2
        raise DomainError(f"{xi} not in basis")

    def diagonal_trace(self) -> complex:
        return complex(np.trace(self.matrix))


def _basis_list(duals) -> list:
    basis = []
    for xi in duals:
        for j in range(xi.dim):
            for i in range(xi.dim):
                basis.append((xi, i, j))
    return basis


def assemble_matrix(sigma: Symbol, cutoff: float,
                    rule: QuadratureRule | None = None) -> TruncatedOperator:
    """Galerkin section M[(xi',i',j'),(xi,i,j)] = <Op(sigma) e_{xi,ij}, e_{xi',i'j'}>.

    Invariant and diagonal symbols produce their exact block form without
    quadrature; x-dependent symbols are integrated on the rule.
    """
    duals = enumerate_dual(sigma.group, cutoff)
    basis = _basis_list(duals)
    n = sum(xi.dim ** 2 for xi in duals)

    if not sigma.x_dependent:
        mat = np.zeros((n, n), dtype=complex)
        off = 0
        for xi in duals:
            d = xi.dim
            blk = np.kron(sigma.value(xi), np.eye(d))
            mat[off:off + d * d, off:off + d * d] = blk
            off += d * d
        return TruncatedOperator(sigma.group, cutoff, mat, basis)

    rule = rule if rule is not None else sigma.rule
    if rule is None:
        raise DomainError("assembling an x-dependent symbol needs a quadrature rule")
    max_level = max((xi.level for xi in duals), default=0.0)
    g_band = 0.0
    if isinstance(sigma, SeparableSymbol) and sigma.g.band_limit is not None:
        g_band = sigma.g.band_limit
    if 2.0 * max_level + g_band > 2.0 * rule.exactness_level:
        warnings.warn(
            "assemble_matrix: exactness not certified "
            f"(needs level {max_level + g_band / 2.0}, rule has {rule.exactness_level})",
            ExactnessWarning, stacklevel=2)

    # columns: Op(sigma) e_{xi,ij} = sqrt(d) (xi(x) sigma(x, xi))_{ij}
    nn = len(rule)
    pmat = np.empty((nn, n), dtype=complex)
    bmat = np.empty((nn, n), dtype=complex)
    off = 0
    for xi in duals:
        d = xi.dim
        mats = rule.eval_irrep(xi)
        sv = _symbol_values_on_rule(sigma, xi, rule)
        prod = mats @ sv if sv.ndim == 2 else np.einsum("nij,njk->nik", mats, sv, optimize=True)
        scale = np.sqrt(d)
        # (i, j) pairs with i fastest: transpose to (node, j, i) before reshaping
        pmat[:, off:off + d * d] = scale * prod.transpose(0, 2, 1).reshape(nn, d * d)
        bmat[:, off:off + d * d] = scale * mats.transpose(0, 2, 1).reshape(nn, d * d)
        off += d * d
    mat = (bmat.conj() * rule.weights[:, None]).T @ pmat
    return TruncatedOperator(sigma.group, cutoff, mat, basis)
