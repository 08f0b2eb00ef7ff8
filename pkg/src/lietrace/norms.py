"""Matrix norms (Schatten, Hilbert-Schmidt, row-sum operator norm) and
quadrature L^p norms in the group variable."""

from __future__ import annotations

import numpy as np

from .errors import DomainError, NumericError


def _is_diagonal(m: np.ndarray) -> bool:
    return not np.any(m - np.diag(np.diagonal(m)))


def singular_values(m: np.ndarray) -> np.ndarray:
    """Singular values, descending.  Diagonal matrices short-circuit the SVD
    (their singular values are exactly the moduli of the diagonal)."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or (np.iscomplexobj(m) and not np.all(np.isfinite(m.imag))):
        raise NumericError("matrix has non-finite entries")
    if _is_diagonal(m):
        return np.sort(np.abs(np.diagonal(m)))[::-1]
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge: {exc}") from exc


def schatten_norm(m: np.ndarray, r: float) -> float:
    """(sum_i s_i^r)^(1/r) over singular values; a quasi-norm for r < 1."""
    if r <= 0:
        raise DomainError(f"Schatten order must be positive, got {r}")
    s = singular_values(m)
    if np.isinf(r):
        return float(s[0]) if s.size else 0.0
    return float(np.sum(s ** r) ** (1.0 / r))


def schatten_pow(m: np.ndarray, r: float) -> float:
    """sum_i s_i^r, the r-th power of the Schatten norm (series term form)."""
    if r <= 0:
        raise DomainError(f"Schatten order must be positive, got {r}")
    s = singular_values(m)
    return float(np.sum(s ** r))


def hilbert_schmidt_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(m)))


def opinf_norm(m: np.ndarray) -> float:
    """Maximum absolute row sum: the operator norm on sup-normed coordinates."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    return float(np.abs(m).sum(axis=1).max())


def matrix_abs_diag(m: np.ndarray) -> np.ndarray:
    """Diagonal of |m| = (m* m)^(1/2), via SVD."""
    m = np.asarray(m)
    if _is_diagonal(m):
        return np.abs(np.diagonal(m)).astype(float)
    _, s, vh = np.linalg.svd(m)
    # |m| = V diag(s) V*;  |m|_jj = sum_k s_k |V_jk|^2
    v = vh.conj().T
    return np.einsum("k,jk->j", s, np.abs(v) ** 2).real


def lp_norm_x(values, p: float, rule) -> float:
    """(sum w_i v_i^p)^(1/p) over nonnegative node values; p = inf is the
    node maximum (a heuristic for the essential sup, flagged by callers)."""
    v = np.asarray(values, dtype=float)
    if v.shape != rule.weights.shape:
        raise DomainError("values must be sampled on the rule's nodes")
    if np.any(v < -1e-15):
        raise DomainError("lp_norm_x expects nonnegative values")
    v = np.maximum(v, 0.0)
    if np.isinf(p):
        return float(v.max()) if v.size else 0.0
    if p < 1:
        raise DomainError(f"function-space order must be >= 1, got {p}")
    return float(np.dot(rule.weights, v ** p) ** (1.0 / p))
