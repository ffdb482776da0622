"""Dense Hermitian matrix arithmetic, functional calculus and Löwner order.

Matrices are plain complex ``numpy`` arrays. The helpers here enforce the
invariants (self-adjointness, positivity) at the boundary instead of wrapping
arrays in a class; every function is pure and returns fresh arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    ConditioningError,
    ConvergenceError,
    DimensionMismatchError,
    DomainError,
    NotPositiveDefiniteError,
)


@dataclass(frozen=True)
class ToleranceConfig:
    tol_order: float = 1e-9
    tol_proj: float = 1e-8
    tol_recon: float = 1e-10
    tol_root: float = 1e-12
    tol_pd: float = 1e-14
    tol_psd: float = 1e-12
    cond_cap: float = 1e13

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ValueError(f"{name} must be strictly positive, got {value}")


DEFAULT_TOL = ToleranceConfig()


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, values=None) -> np.ndarray:
        w = self.eigenvalues if values is None else values
        U = self.eigenvectors
        return hermitian((U * w) @ U.conj().T)


class Relation(str, enum.Enum):
    GEQ = "GEQ"
    LEQ = "LEQ"
    EQ = "EQ"
    INCOMPARABLE = "INCOMPARABLE"


@dataclass(frozen=True)
class LownerVerdict:
    relation: Relation
    margin: float

    @property
    def geq(self) -> bool:
        return self.relation in (Relation.GEQ, Relation.EQ)

    @property
    def leq(self) -> bool:
        return self.relation in (Relation.LEQ, Relation.EQ)


def hermitian(a) -> np.ndarray:
    """Return ``(a + a*)/2`` as a complex square matrix.

    Scalars and 0-d input become 1x1 matrices. The diagonal comes out real
    because the averaging cancels its imaginary part exactly.
    """
    m = np.array(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    # (z + conj(z))/2 has an exactly zero imaginary part, so the diagonal is real
    return 0.5 * (m + m.conj().T)


def _same_dims(*mats):
    dims = {m.shape for m in mats}
    if len(dims) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {sorted(dims)}")


def opnorm(a) -> float:
    """Spectral norm."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def scale_of(*mats) -> float:
    return max([1.0] + [opnorm(m) for m in mats])


def spectral_decompose(a, tol: ToleranceConfig = DEFAULT_TOL) -> SpectralDecomposition:
    a = hermitian(a)
    try:
        w, U = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigen-solver did not converge: {exc}") from exc
    dec = SpectralDecomposition(w, U)
    err = opnorm(dec.reconstruct() - a)
    if err > tol.tol_recon * scale_of(a) * max(1, a.shape[0]):
        raise ConvergenceError(f"spectral reconstruction error {err:.3e} too large")
    return dec


def eigvalsh(a) -> np.ndarray:
    return np.linalg.eigvalsh(hermitian(a))


def min_eig(a) -> float:
    return float(eigvalsh(a)[0])


def is_psd(a, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return min_eig(a) >= -tol.tol_psd * scale_of(a)


def is_pd(a, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return min_eig(a) > tol.tol_pd


def check_pd(a, tol: ToleranceConfig = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    """Return the Hermitian part of ``a``, raising unless it is positive definite."""
    a = hermitian(a)
    lo = min_eig(a)
    if not lo > tol.tol_pd:
        raise NotPositiveDefiniteError(f"{name} is not positive definite (min eig {lo:.3e})")
    return a


def check_psd(a, tol: ToleranceConfig = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    a = hermitian(a)
    lo = min_eig(a)
    if lo < -tol.tol_psd * scale_of(a):
        raise NotPositiveDefiniteError(f"{name} is not positive semidefinite (min eig {lo:.3e})")
    return a


def apply_function(f: Callable, a, domain: tuple[float, float] | None = None,
                   tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Lift a scalar function to a Hermitian matrix by functional calculus.

    ``f`` is evaluated on the array of eigenvalues; scalar-only callables are
    accepted too. ``domain`` is an optional open interval the spectrum must
    lie in.
    """
    dec = spectral_decompose(a, tol)
    w = dec.eigenvalues
    if domain is not None:
        lo, hi = domain
        bad = w[(w <= lo) | (w >= hi)]
        if bad.size:
            raise DomainError(f"eigenvalue {bad[0]!r} outside domain ({lo}, {hi})")
    with np.errstate(all="ignore"):
        try:
            fw = np.asarray(f(w), dtype=float)
            if fw.shape != w.shape:
                fw = np.broadcast_to(fw, w.shape).astype(float)
        except (TypeError, ValueError):
            fw = np.array([float(f(x)) for x in w])
    bad = ~np.isfinite(fw)
    if bad.any():
        raise DomainError(f"function undefined at eigenvalue {w[bad][0]!r}")
    return dec.reconstruct(fw)


def sqrt_pd(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    return apply_function(np.sqrt, check_pd(a, tol), tol=tol)


def invsqrt_pd(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    return apply_function(lambda w: 1.0 / np.sqrt(w), check_pd(a, tol), tol=tol)


def inv_pd(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    return apply_function(lambda w: 1.0 / w, check_pd(a, tol), tol=tol)


def sqrt_psd(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Square root that clips round-off negatives of a PSD matrix to zero."""
    return apply_function(lambda w: np.sqrt(np.clip(w, 0.0, None)), check_psd(a, tol), tol=tol)


def congruence(x, a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``X* A X`` for an invertible ``X``."""
    x = np.asarray(x, dtype=complex)
    a = hermitian(a)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionMismatchError(f"X must be square, got {x.shape}")
    _same_dims(x, a)
    cond = np.linalg.cond(x)
    if not np.isfinite(cond) or cond > tol.cond_cap:
        raise ConditioningError(f"X is near-singular (condition number {cond:.3e})")
    return hermitian(x.conj().T @ a @ x)


def lowner_margin(a, b) -> float:
    """Scale-normalized smallest eigenvalue of ``A - B``.

    Nonnegative (up to tolerance) exactly when ``A >= B``.
    """
    a, b = hermitian(a), hermitian(b)
    _same_dims(a, b)
    return min_eig(a - b) / scale_of(a, b)


def lowner_compare(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> LownerVerdict:
    a, b = hermitian(a), hermitian(b)
    _same_dims(a, b)
    s = scale_of(a, b)
    diff = eigvalsh(a - b)
    geq = diff[0] / s
    leq = -diff[-1] / s
    t = tol.tol_order
    if geq >= -t and leq >= -t:
        return LownerVerdict(Relation.EQ, geq)
    if geq >= -t:
        return LownerVerdict(Relation.GEQ, geq)
    if leq >= -t:
        return LownerVerdict(Relation.LEQ, leq)
    return LownerVerdict(Relation.INCOMPARABLE, geq)


def is_projection(p, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    p = np.asarray(p, dtype=complex)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        return False
    t = tol.tol_proj
    if opnorm(p - p.conj().T) > t or opnorm(p @ p - p) > t:
        return False
    w = eigvalsh(p)
    return bool(np.all(np.minimum(np.abs(w), np.abs(w - 1)) <= t))


def check_projection(p, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    if not is_projection(p, tol):
        raise ValueError("matrix is not an orthogonal projection")
    return hermitian(p)


def _spectral_projection(a, keep) -> np.ndarray:
    w, U = np.linalg.eigh(hermitian(a))
    V = U[:, keep(w)]
    return hermitian(V @ V.conj().T)


def support_projection(x, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Projection onto the range of a PSD matrix.

    Eigenvalues at or below ``tol_proj`` times the largest one count as zero.
    """
    x = hermitian(x)
    top = float(eigvalsh(x)[-1]) if x.size else 0.0
    if top <= 0:
        return np.zeros_like(x)
    return _spectral_projection(x, lambda w: w > tol.tol_proj * top)


def jordan_decompose(s) -> tuple[np.ndarray, np.ndarray]:
    """Split ``S = S_plus - S_minus`` into orthogonally supported PSD parts."""
    dec = spectral_decompose(s)
    w = dec.eigenvalues
    return dec.reconstruct(np.clip(w, 0, None)), dec.reconstruct(np.clip(-w, 0, None))


def projection_meet(p, q, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``P ∧ Q``: the projection onto range(P) ∩ range(Q).

    Computed as the eigenvalue-2 spectral projection of ``P + Q``.
    """
    p, q = check_projection(p, tol), check_projection(q, tol)
    _same_dims(p, q)
    return _spectral_projection(p + q, lambda w: w >= 2.0 - tol.tol_proj)


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_pd(dim: int, seed=None, cond_cap: float = 1e4, real: bool = False) -> np.ndarray:
    """Random positive definite ``G G* + δI`` with condition number at most ``cond_cap``.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``. The result
    is normalized to unit spectral norm before the shift.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if not cond_cap > 1:
        raise ValueError("cond_cap must exceed 1")
    rng = _as_generator(seed)
    g = rng.standard_normal((dim, dim))
    if not real:
        g = g + 1j * rng.standard_normal((dim, dim))
    a = hermitian(g @ g.conj().T)
    w = eigvalsh(a)
    a = a / w[-1]
    lo, hi = w[0] / w[-1], 1.0
    # shift so that (hi + d) / (lo + d) <= cond_cap, with a little headroom
    cap = cond_cap * (1 - 1e-9)
    delta = max((hi - cap * lo) / (cap - 1), 0.0) + 1e-12
    return hermitian(a + delta * np.eye(dim))


def random_vector(dim: int, seed=None, real: bool = False) -> np.ndarray:
    rng = _as_generator(seed)
    v = rng.standard_normal(dim).astype(complex)
    if not real:
        v = v + 1j * rng.standard_normal(dim)
    return v


def random_invertible(dim: int, seed=None, cond_cap: float = 100.0) -> np.ndarray:
    """Random complex matrix with singular values compressed below ``cond_cap``."""
    rng = _as_generator(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    u, s, vh = np.linalg.svd(g)
    s = s / s[0]
    s = np.maximum(s, 1.0 / cond_cap)
    return (u * s) @ vh


def block2(x, z, y) -> np.ndarray:
    x, y = hermitian(x), hermitian(y)
    z = np.asarray(z, dtype=complex)
    _same_dims(x, y, z)
    return hermitian(np.block([[x, z], [z.conj().T, y]]))


def block2_margin(x, z, y) -> float:
    m = block2(x, z, y)
    return min_eig(m) / scale_of(m)


def block2_psd(x, z, y, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether ``[[X, Z], [Z*, Y]]`` is positive semidefinite within ``tol_order``."""
    return block2_margin(x, z, y) >= -tol.tol_order
