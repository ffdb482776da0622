"""Kubo–Ando operator means on positive definite matrices.

A mean is generated by its representing function ``h`` (with ``h(1) = 1``)
through ``A σ B = A^{1/2} h(A^{-1/2} B A^{-1/2}) A^{1/2}``. The three classical
means also carry closed forms, which are what ``σ(A, B)`` uses; the generic
route is always available as :func:`kubo_ando`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import ConvergenceError, DimensionMismatchError, DomainError, OpMeansError
from .hermitian import (
    DEFAULT_TOL,
    ToleranceConfig,
    apply_function,
    check_pd,
    check_psd,
    hermitian,
    inv_pd,
    opnorm,
    scale_of,
    spectral_decompose,
)

_GRID = np.concatenate([np.geomspace(1e-3, 1e3, 61), [1.0]])


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"weight must lie in [0, 1], got {lam}")
    return lam


@dataclass(frozen=True)
class RepresentingFunction:
    evaluator: Callable[[np.ndarray], np.ndarray]
    name: str
    h_at_0: float
    deriv_at_1: float
    is_symmetric: bool

    def __call__(self, x):
        with np.errstate(all="ignore"):
            return np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float)

    @classmethod
    def register(cls, evaluator, name: str, tol: float = 1e-9) -> "RepresentingFunction":
        """Validate a candidate representing function and freeze its summary data.

        Operator monotonicity cannot be decided from samples, so the checks are
        the necessary ones: ``h(1) = 1``, nonnegativity, monotonicity and
        concavity on a grid, ``h'(1)`` in ``[0, 1]``, and the symmetric-mean
        sandwich ``2x/(x+1) <= h(x) <= (x+1)/2`` when ``h(x) = x h(1/x)``.
        """

        def h(x):
            with np.errstate(all="ignore"):
                return np.asarray(evaluator(np.asarray(x, dtype=float)), dtype=float)

        at1 = float(h(np.array([1.0]))[0])
        if abs(at1 - 1.0) > 1e-12:
            raise ValueError(f"{name}: h(1) = {at1!r}, expected 1")
        x = _GRID
        hx = h(x)
        if hx.shape != x.shape or not np.all(np.isfinite(hx)):
            raise ValueError(f"{name}: evaluator must be vectorized and finite on (0, inf)")
        if np.any(hx < -tol):
            raise ValueError(f"{name}: h takes negative values")
        order = np.argsort(x)
        xs, hs = x[order], hx[order]
        if np.any(np.diff(hs) < -tol * np.maximum(1, hs[1:])):
            raise ValueError(f"{name}: h is not nondecreasing")
        mid = h(0.5 * (xs[:-2] + xs[2:]))
        if np.any(mid < 0.5 * (hs[:-2] + hs[2:]) - tol * np.maximum(1, mid)):
            raise ValueError(f"{name}: h is not concave")
        h0 = float(h(np.array([0.0]))[0])
        if not np.isfinite(h0):
            h0 = float(h(np.array([1e-300]))[0])
        step = 1e-5
        d1 = float((h(np.array([1 + step])) - h(np.array([1 - step])))[0] / (2 * step))
        if not -1e-6 <= d1 <= 1 + 1e-6:
            raise ValueError(f"{name}: h'(1) = {d1} outside [0, 1]")
        symmetric = bool(np.all(np.abs(hx - x * h(1.0 / x)) <= 1e-10 * np.maximum(1, hx)))
        if symmetric:
            upper, lower = (x + 1) / 2, 2 * x / (x + 1)
            if np.any(hx > upper + tol * upper) or np.any(hx < lower - tol * upper):
                raise ValueError(f"{name}: symmetric h violates (x+1)/2 >= h >= 2x/(x+1)")
        return cls(evaluator, name, max(h0, 0.0), min(max(d1, 0.0), 1.0), symmetric)


@dataclass(frozen=True)
class OperatorMean:
    h: RepresentingFunction
    binary: Callable | None = field(default=None, compare=False, repr=False)

    @property
    def name(self) -> str:
        return self.h.name

    @property
    def is_symmetric(self) -> bool:
        return self.h.is_symmetric

    def __call__(self, a, b, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
        if self.binary is not None:
            return self.binary(a, b, tol)
        return kubo_ando(self, a, b, tol)

    def scalar(self, a: float, b: float) -> float:
        """``a σ b`` for positive scalars, straight from ``h``."""
        return float(a * self.h(b / a))


class _Congruence:
    """Cached ``A^{1/2}`` and ``A^{-1/2}`` of a positive definite ``A``."""

    def __init__(self, a, tol):
        dec = spectral_decompose(check_pd(a, tol, "A"), tol)
        w = dec.eigenvalues
        self.sqrt = dec.reconstruct(np.sqrt(w))
        self.isqrt = dec.reconstruct(1.0 / np.sqrt(w))

    def inner(self, b):
        return hermitian(self.isqrt @ b @ self.isqrt)

    def outer(self, c):
        return hermitian(self.sqrt @ c @ self.sqrt)


def kubo_ando(sigma: OperatorMean, a, b, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Generic ``A^{1/2} h(A^{-1/2} B A^{-1/2}) A^{1/2}`` for positive definite ``A``, ``B``."""
    b = check_pd(b, tol, "B")
    t = _Congruence(a, tol)
    if t.sqrt.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {t.sqrt.shape} vs {b.shape}")
    return t.outer(apply_function(sigma.h, t.inner(b), tol=tol))


def arithmetic(a, b, lam: float = 0.5, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    lam = _check_lambda(lam)
    a, b = check_pd(a, tol, "A"), check_pd(b, tol, "B")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return hermitian((1 - lam) * a + lam * b)


def parallel_sum(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``A : B = (A^{-1} + B^{-1})^{-1}``."""
    a, b = check_pd(a, tol, "A"), check_pd(b, tol, "B")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return inv_pd(inv_pd(a, tol) + inv_pd(b, tol), tol)


def harmonic(a, b, lam: float = 0.5, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    lam = _check_lambda(lam)
    a, b = check_pd(a, tol, "A"), check_pd(b, tol, "B")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return inv_pd((1 - lam) * inv_pd(a, tol) + lam * inv_pd(b, tol), tol)


def geometric(a, b, lam: float = 0.5, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Weighted geometric mean ``A^{1/2} (A^{-1/2} B A^{-1/2})^λ A^{1/2}``.

    ``B`` may be singular PSD (the limit is then taken spectrally), ``A`` must
    be positive definite.
    """
    lam = _check_lambda(lam)
    b = check_psd(b, tol, "B")
    t = _Congruence(a, tol)
    if t.sqrt.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {t.sqrt.shape} vs {b.shape}")
    c = t.inner(b)
    return t.outer(apply_function(lambda w: np.clip(w, 0, None) ** lam, c, tol=tol))


def _arith_h(lam):
    return lambda x: (1 - lam) + lam * x


def _harm_h(lam):
    def h(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = x / ((1 - lam) * x + lam)
        if lam == 0:
            return np.ones_like(x)
        return np.where(x == 0, 0.0, out)
    return h


def _geom_h(lam):
    return lambda x: np.asarray(x, dtype=float) ** lam


def _weighted(kind: str, lam: float) -> OperatorMean:
    lam = _check_lambda(lam)
    if kind == "arith":
        h = RepresentingFunction(_arith_h(lam), _ident(kind, lam), 1 - lam, lam, lam == 0.5)
        return OperatorMean(h, lambda a, b, tol=DEFAULT_TOL: arithmetic(a, b, lam, tol))
    if kind == "harm":
        h = RepresentingFunction(_harm_h(lam), _ident(kind, lam), 1.0 if lam == 0 else 0.0, lam,
                                 lam == 0.5)
        return OperatorMean(h, lambda a, b, tol=DEFAULT_TOL: harmonic(a, b, lam, tol))
    if kind == "geom":
        h = RepresentingFunction(_geom_h(lam), _ident(kind, lam), 1.0 if lam == 0 else 0.0, lam,
                                 lam == 0.5)
        return OperatorMean(h, lambda a, b, tol=DEFAULT_TOL: geometric(a, b, lam, tol))
    raise KeyError(kind)


def _ident(kind, lam):
    return kind if lam == 0.5 else f"{kind}:{lam:g}"


ARITH = _weighted("arith", 0.5)
HARM = _weighted("harm", 0.5)
GEOM = _weighted("geom", 0.5)


def register_mean(evaluator, name: str) -> OperatorMean:
    """Build a mean from a user-supplied representing function."""
    return OperatorMean(RepresentingFunction.register(evaluator, name))


# ---------------------------------------------------------------------------
# measure-defined symmetric means
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetricMeanMeasure:
    """Atomic data ``(α, ν)`` of a symmetric mean.

    ``A σ B = α/2 (A + B) + Σ w (λ+1)/(2λ) {(λA):B + A:(λB)}`` with
    ``α + Σ w = 1``.
    """

    alpha: float
    atoms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple((float(l), float(w)) for l, w in self.atoms))
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        for lam, w in self.atoms:
            if not lam > 0 or not w > 0:
                raise ValueError(f"atoms need λ > 0 and w > 0, got ({lam}, {w})")
        total = self.alpha + sum(w for _, w in self.atoms)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"alpha + total weight must equal 1, got {total!r}")

    def h(self, x):
        x = np.asarray(x, dtype=float)
        out = self.alpha * (1 + x) / 2
        for lam, w in self.atoms:
            # (λ·1):x + 1:(λx) for scalars, written to stay finite at x = 0
            out = out + w * (lam + 1) / (2 * lam) * (lam * x / (lam + x) + lam * x / (1 + lam * x))
        return out

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "atoms": [list(a) for a in self.atoms]}

    @classmethod
    def from_json(cls, obj) -> "SymmetricMeanMeasure":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(float(obj.get("alpha", 0.0)), tuple(tuple(a) for a in obj.get("atoms", [])))


def _mean_from_measure_pd(m: SymmetricMeanMeasure, a, b, tol):
    a, b = check_pd(a, tol, "A"), check_pd(b, tol, "B")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    out = m.alpha / 2 * (a + b)
    for lam, w in m.atoms:
        out = out + w * (lam + 1) / (2 * lam) * (
            parallel_sum(lam * a, b, tol) + parallel_sum(a, lam * b, tol)
        )
    return hermitian(out)


def measure_mean(m: SymmetricMeanMeasure) -> OperatorMean:
    name = "measure:" + json.dumps(m.to_json(), separators=(",", ":"))
    h = RepresentingFunction(m.h, name, m.alpha / 2, 0.5, True)
    return OperatorMean(h, lambda a, b, tol=DEFAULT_TOL: mean_from_measure(m, a, b, tol))


def mean_from_measure(m: SymmetricMeanMeasure, a, b, tol: ToleranceConfig = DEFAULT_TOL):
    """Evaluate the measure formula; singular PSD inputs go through :func:`psd_extend`."""
    a, b = hermitian(a), hermitian(b)
    try:
        return _mean_from_measure_pd(m, a, b, tol)
    except OpMeansError:
        check_psd(a, tol, "A"), check_psd(b, tol, "B")
    sigma = OperatorMean(measure_mean(m).h, lambda x, y, t=DEFAULT_TOL: _mean_from_measure_pd(m, x, y, t))
    return psd_extend(sigma, a, b, tol=tol).value


# ---------------------------------------------------------------------------
# extension to PSD, adjoints
# ---------------------------------------------------------------------------

DEFAULT_EPS_SCHEDULE = (1e-4, 1e-6, 1e-8)


class PsdExtension(NamedTuple):
    value: np.ndarray
    gap: float
    gaps: tuple[float, ...]
    iterates: tuple[np.ndarray, ...]


def psd_extend(sigma: OperatorMean, a, b, eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE,
               tol: ToleranceConfig = DEFAULT_TOL) -> PsdExtension:
    """``A σ B`` for PSD inputs as the limit of ``(A + εI) σ (B + εI)``.

    The last iterate is returned together with the spectral-norm gaps between
    successive iterates. A growing gap above round-off level raises
    :class:`ConvergenceError`.
    """
    a, b = check_psd(a, tol, "A"), check_psd(b, tol, "B")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    eps = sorted((float(e) for e in eps_schedule), reverse=True)
    if not eps or eps[-1] <= 0:
        raise ValueError("eps_schedule needs positive entries")
    eye = np.eye(a.shape[0])
    iterates = tuple(sigma(a + e * eye, b + e * eye, tol) for e in eps)
    gaps = tuple(opnorm(y - x) for x, y in zip(iterates, iterates[1:]))
    floor = 1e3 * np.finfo(float).eps * scale_of(a, b)
    for g0, g1 in zip(gaps, gaps[1:]):
        if g1 > g0 and g1 > floor:
            raise ConvergenceError(f"ε-limit diverges: gaps {gaps}")
    return PsdExtension(iterates[-1], gaps[-1] if gaps else 0.0, gaps, iterates)


def adjoint_mean(sigma: OperatorMean) -> OperatorMean:
    """``A σ* B = (A^{-1} σ B^{-1})^{-1}``, with ``h*(x) = 1/h(1/x)``."""
    h = sigma.h
    probe = h(_GRID)
    if np.any(probe <= 0):
        raise DomainError(f"{h.name}: h vanishes on (0, inf); adjoint undefined")

    def h_star(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 1.0 / h(1.0 / x)
            at_inf = h(np.array([1e300]))[0]
        return np.where(x == 0, 1.0 / at_inf if at_inf > 0 else np.inf, out)

    h0 = float(h_star(np.array([0.0]))[0])
    name = sigma.name[len("adjoint:"):] if sigma.name.startswith("adjoint:") else "adjoint:" + sigma.name
    rf = RepresentingFunction(h_star, name, h0, h.deriv_at_1, h.is_symmetric)

    def binary(a, b, tol=DEFAULT_TOL):
        return inv_pd(sigma(inv_pd(a, tol), inv_pd(b, tol), tol), tol)

    return OperatorMean(rf, binary)


def symmetric_alpha(sigma: OperatorMean) -> float:
    """Weight ``α`` of the arithmetic part of a symmetric mean, ``2 lim h(x)/x``."""
    x = 1e16
    return float(min(1.0, max(0.0, 2 * sigma.h(np.array([x]))[0] / x)))


# ---------------------------------------------------------------------------
# n-ary means
# ---------------------------------------------------------------------------


def _check_list(mats, tol):
    if len(mats) == 0:
        raise ValueError("need at least one matrix")
    mats = [check_pd(m, tol, f"A{i + 1}") for i, m in enumerate(mats)]
    if len({m.shape for m in mats}) != 1:
        raise DimensionMismatchError("matrices have different dimensions")
    return mats


def n_arithmetic(mats, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    mats = _check_list(mats, tol)
    return hermitian(sum(mats) / len(mats))


def n_harmonic(mats, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    mats = _check_list(mats, tol)
    return inv_pd(sum(inv_pd(m, tol) for m in mats) / len(mats), tol)


def alm_geometric(mats, tol: float = 1e-10, max_iter: int = 500,
                  tolerances: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Recursive geometric mean of ``n`` positive definite matrices.

    Each sweep replaces every ``A_i`` by the geometric mean of the other
    ``n - 1`` matrices; the sweeps stop once no matrix moves by more than
    ``tol`` (spectral norm, relative to the largest input norm).
    """
    mats = _check_list(mats, tolerances)
    n = len(mats)
    if n < 2:
        raise ValueError("need at least two matrices")
    if n == 2:
        return geometric(mats[0], mats[1], 0.5, tolerances)
    s = scale_of(*mats)
    current = list(mats)
    for _ in range(max_iter):
        nxt = [
            alm_geometric(current[:i] + current[i + 1:], tol, max_iter, tolerances)
            for i in range(n)
        ]
        step = max(opnorm(x - y) for x, y in zip(nxt, current))
        current = nxt
        if step < tol * s:
            return hermitian(sum(current) / n)
    raise ConvergenceError(f"ALM iteration did not converge in {max_iter} sweeps (last step {step:.3e})")


# ---------------------------------------------------------------------------
# identifiers
# ---------------------------------------------------------------------------


def parse_mean(ident: str) -> OperatorMean:
    """Resolve ``arith``, ``harm:0.3``, ``geom``, ``measure:{json}``, ``adjoint:<id>``."""
    ident = ident.strip()
    if ident.startswith("adjoint:"):
        return adjoint_mean(parse_mean(ident[len("adjoint:"):]))
    if ident.startswith("measure:"):
        return measure_mean(SymmetricMeanMeasure.from_json(ident[len("measure:"):]))
    kind, _, lam = ident.partition(":")
    if kind not in ("arith", "harm", "geom"):
        raise KeyError(f"unknown mean id {ident!r}")
    try:
        value = float(lam) if lam else 0.5
    except ValueError as exc:
        raise KeyError(f"bad weight in mean id {ident!r}") from exc
    if not math.isfinite(value):
        raise KeyError(f"bad weight in mean id {ident!r}")
    return _weighted(kind, value)
