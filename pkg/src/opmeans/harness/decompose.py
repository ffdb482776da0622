"""Writing a sandwiched pair as (arithmetic mean, σ-mean) of one pair, and the chain built on it."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..catalog import resolve_function
from ..errors import DomainError, PreconditionError
from ..hermitian import (
    DEFAULT_TOL,
    ToleranceConfig,
    apply_function,
    check_pd,
    eigvalsh,
    hermitian,
    inv_pd,
    lowner_margin,
    opnorm,
    scale_of,
    spectral_decompose,
)
from ..matrix_io import matrix_to_json
from ..means import OperatorMean, geometric, kubo_ando, parse_mean


def _mean(sigma) -> OperatorMean:
    return parse_mean(sigma) if isinstance(sigma, str) else sigma


def gamma0(sigma) -> float:
    """``2 σ 0 = 2 h(0)``."""
    return 2.0 * _mean(sigma).h.h_at_0


def _require_symmetric(sigma: OperatorMean):
    if not sigma.is_symmetric:
        raise PreconditionError(f"{sigma.name} is not a symmetric mean")


def phi(sigma, t):
    """``φ(t) = t σ (2 - t)`` on ``[0, 1]``; vectorized."""
    sigma = _mean(sigma)
    _require_symmetric(sigma)
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise DomainError("phi is defined on [0, 1]")
    safe = np.where(t > 0, t, 1.0)
    with np.errstate(all="ignore"):
        out = np.where(t > 0, safe * sigma.h((2 - safe) / safe), gamma0(sigma))
    return float(out) if out.ndim == 0 else out


def phi_inverse(sigma, y, tol_root: float = DEFAULT_TOL.tol_root):
    """Invert the strictly increasing ``φ`` by bisection on ``[0, 1]``."""
    sigma = _mean(sigma)
    g0 = gamma0(sigma)
    if g0 >= 1:
        raise PreconditionError(f"{sigma.name}: φ is not invertible when 2σ0 = 1")
    y = np.asarray(y, dtype=float)
    slack = 1e-13
    if np.any((y < g0 - slack) | (y > 1 + slack)):
        raise DomainError(f"values must lie in [{g0}, 1]")
    y_c = np.clip(y, g0, 1.0)
    lo, hi = np.zeros_like(y_c), np.ones_like(y_c)
    # relative bracket width, so roots near 0 (where φ may be steep) are resolved too
    for _ in range(1100):
        mid = 0.5 * (lo + hi)
        below = phi(sigma, mid) < y_c
        lo, hi = np.where(below, mid, lo), np.where(below, hi, mid)
        if np.all(hi - lo <= np.maximum(1e-3 * tol_root * hi, 4 * np.spacing(hi))):
            break
    # the endpoints are exact; the float plateau of φ near its maximum would miss t = 1
    out = np.where(y_c >= 1.0, 1.0, np.where(y_c <= g0, 0.0, 0.5 * (lo + hi)))
    return float(out) if out.ndim == 0 else out


def decompose_mean_pair(sigma, x, y, tol: ToleranceConfig = DEFAULT_TOL,
                        gamma: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Find positive definite ``A``, ``B`` with ``A ∇ B = X`` and ``A σ B = Y``.

    Needs ``X >= Y >= γX`` for some ``γ`` above ``2σ0``. Reduces to ``X = I``
    by congruence, takes ``A' = φ^{-1}(X^{-1/2} Y X^{-1/2})`` and ``B' = 2I - A'``.
    """
    sigma = _mean(sigma)
    _require_symmetric(sigma)
    g0 = gamma0(sigma)
    if g0 >= 1:
        raise PreconditionError(f"{sigma.name}: decomposition needs σ different from ∇")
    x, y = check_pd(x, tol, "X"), check_pd(y, tol, "Y")
    upper = lowner_margin(x, y)
    if upper < -tol.tol_order:
        raise PreconditionError(f"X >= Y fails (margin {upper:.3e})")
    dec = spectral_decompose(x, tol)
    xs = dec.reconstruct(np.sqrt(dec.eigenvalues))
    xis = dec.reconstruct(1.0 / np.sqrt(dec.eigenvalues))
    yp = hermitian(xis @ y @ xis)
    w = eigvalsh(yp)
    floor = g0 if gamma is None else gamma
    if gamma is not None and gamma <= g0:
        raise PreconditionError(f"gamma {gamma} must exceed 2σ0 = {g0}")
    if w[0] <= g0 or w[0] < floor * (1 - tol.tol_order):
        raise PreconditionError(
            f"Y >= γX fails: smallest eigenvalue of X^-1/2 Y X^-1/2 is {w[0]:.6g}, "
            f"needs > {g0:.6g}" + ("" if gamma is None else f" and >= {gamma:.6g}")
        )
    a1 = apply_function(lambda v: phi_inverse(sigma, np.clip(v, g0, 1.0), tol.tol_root), yp, tol=tol)
    b1 = 2 * np.eye(x.shape[0]) - a1
    return hermitian(xs @ a1 @ xs), hermitian(xs @ b1 @ xs)


def decomposition_residuals(sigma, x, y, a, b) -> dict:
    sigma = _mean(sigma)
    x, y = hermitian(x), hermitian(y)
    return {
        "arith_residual": opnorm(0.5 * (a + b) - x) / scale_of(x),
        "mean_residual": opnorm(kubo_ando(sigma, a, b) - y) / scale_of(y),
    }


def decompose_closed_form(sigma, x, y, tol: ToleranceConfig = DEFAULT_TOL):
    """Explicit decompositions for the harmonic and geometric means.

    Harmonic: ``A, B = X ∓ X # (X - Y)``. Geometric: ``A, B = X ∓ X # (X - Y X^{-1} Y)``.
    """
    sigma = _mean(sigma)
    x, y = check_pd(x, tol, "X"), check_pd(y, tol, "Y")
    if sigma.name == "harm":
        inner = x - y
    elif sigma.name == "geom":
        inner = hermitian(x - y @ inv_pd(x, tol) @ y)
    else:
        raise PreconditionError(f"no closed form for {sigma.name}; use decompose_mean_pair")
    low = eigvalsh(inner)[0] / scale_of(x, y)
    if low < -tol.tol_order:
        raise PreconditionError(f"inner argument of # is not PSD (margin {low:.3e})")
    g = geometric(x, hermitian(inner) + max(0.0, -eigvalsh(inner)[0]) * np.eye(x.shape[0]), tol=tol)
    return hermitian(x - g), hermitian(x + g)


@dataclass
class ChainStep:
    k: int
    upper_margin: float
    lower_margin: float
    arith_residual: float
    mean_residual: float
    monotone_margin: float | None
    distance: float
    predicted_distance: float

    @property
    def decay_error(self) -> float:
        if self.predicted_distance == 0:
            return self.distance
        return abs(self.distance - self.predicted_distance) / self.predicted_distance


@dataclass
class ChainReport:
    mean: str
    function: str | None
    gamma: float
    steps: list = field(default_factory=list)
    iterates: list = field(default_factory=list)

    def passed(self, tol: float = 1e-9, mean_tol: float = 1e-7, decay_tol: float = 1e-12) -> bool:
        for s in self.steps:
            if min(s.upper_margin, s.lower_margin) < -tol:
                return False
            if s.monotone_margin is not None and s.monotone_margin < -tol:
                return False
            if s.arith_residual > tol or s.mean_residual > mean_tol or s.decay_error > decay_tol:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "mean": self.mean,
            "function": self.function,
            "gamma": self.gamma,
            "pass": self.passed(),
            "steps": [dict(vars(s), decay_error=s.decay_error) for s in self.steps],
            "iterates": [matrix_to_json(x) for x in self.iterates],
        }


def prop41_chain(sigma, f, x, y, gamma: float, k_max: int = 10,
                 tol: ToleranceConfig = DEFAULT_TOL) -> ChainReport:
    """Walk ``X_k = γ^k X + (1 - γ^k) Y`` from ``X`` down to ``Y``.

    Each step checks ``X_k >= X_{k+1} >= γ X_k``, realizes the step as
    ``X_k = A ∇ B``, ``X_{k+1} = A σ B``, and (when ``f`` is given) records
    ``f(X_k) >= f(X_{k+1})``.
    """
    sigma = _mean(sigma)
    if isinstance(f, str):
        f = resolve_function(f)
    g0 = gamma0(sigma)
    if not g0 < gamma < 1:
        raise PreconditionError(f"gamma must lie in (2σ0, 1) = ({g0}, 1), got {gamma}")
    x, y = check_pd(x, tol, "X"), check_pd(y, tol, "Y")
    if lowner_margin(x, y) < -tol.tol_order:
        raise PreconditionError("chain needs X >= Y")
    diff = x - y
    d0 = opnorm(diff)

    def x_k(k):
        # same value as γ^k X + (1 - γ^k) Y, without cancellation in X_k - Y
        return hermitian(y + gamma**k * diff)

    report = ChainReport(sigma.name, None if f is None else f.name, gamma)
    cur = x_k(0)
    report.iterates.append(cur)
    for k in range(k_max + 1):
        nxt = x_k(k + 1)
        a, b = decompose_mean_pair(sigma, cur, nxt, tol, gamma=gamma)
        res = decomposition_residuals(sigma, cur, nxt, a, b)
        mono = None
        if f is not None:
            mono = lowner_margin(apply_function(f, cur), apply_function(f, nxt))
        report.steps.append(ChainStep(
            k,
            lowner_margin(cur, nxt),
            lowner_margin(nxt, gamma * cur),
            res["arith_residual"],
            res["mean_residual"],
            mono,
            opnorm(cur - y),
            gamma**k * d0,
        ))
        report.iterates.append(nxt)
        cur = nxt
    return report
