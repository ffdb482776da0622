"""Explicit 2x2 constructions that break candidate inequalities."""

from __future__ import annotations

import math

import numpy as np

from ..errors import PreconditionError
from ..hermitian import (
    jordan_decompose,
    lowner_compare,
    lowner_margin,
    min_eig,
    opnorm,
    projection_meet,
    support_projection,
)
from ..means import parse_mean, psd_extend, symmetric_alpha
from .conditions import projection_pair
from .report import Witness


def lemma22_bound(theta: float) -> float:
    """Lower bound ``2cos²θ / (1 + cos²θ)`` forced on ``2α - 1``."""
    c2 = math.cos(theta) ** 2
    return 2 * c2 / (1 + c2)


def lemma22_witness(theta: float, eps: float, mean: str = "harm") -> Witness:
    """Projection pair ``P ∧ Q = 0`` showing ``(A∇B)² <= A σ B`` fails near projections.

    ``margin`` is the signed slack of ``(P∇Q + εI)² <= (P + εI) σ (Q + εI)``;
    ``margin_squared`` the same with ``σ`` applied to the squares.
    """
    if not 0 < theta < math.pi / 2:
        raise PreconditionError(f"theta must lie in (0, π/2), got {theta}")
    if not eps > 0:
        raise PreconditionError(f"eps must be positive, got {eps}")
    sigma = parse_mean(mean)
    if not sigma.is_symmetric:
        raise PreconditionError(f"{mean} is not a symmetric mean")
    p, q = projection_pair(theta)
    eye = np.eye(2)
    pvq = 0.5 * (p + q)
    quarter = 0.25 * (p + q + p @ q + q @ p)
    a, b = p + eps * eye, q + eps * eye
    lhs = (pvq + eps * eye) @ (pvq + eps * eye)
    rhs = sigma(a, b)
    rhs_sq = sigma(a @ a, b @ b)
    alpha = symmetric_alpha(sigma)
    ext = psd_extend(sigma, p, q)
    bound = lemma22_bound(theta)
    margin = lowner_margin(rhs, lhs)
    return Witness(
        matrices={
            "P": p, "Q": q, "meet": projection_meet(p, q),
            "PvQ_sq": pvq @ pvq, "quarter_form": quarter,
            "lhs": lhs, "rhs": rhs, "rhs_squared": rhs_sq, "P_sigma_Q": ext.value,
        },
        scalars={
            "theta": theta, "eps": eps,
            "bound": bound, "alpha_lower": 0.5 * (1 + bound), "alpha": alpha,
            "f26_margin": lowner_margin((2 * alpha - 1) * (p + q), p @ q + q @ p),
            "psd_gap": ext.gap,
            "margin": margin,
            "margin_squared": lowner_margin(rhs_sq, lhs),
        },
        meta={"family": "lemma22", "mean": sigma.name, "violated": bool(margin < 0)},
    )


def lemma24_witness(eps: float) -> Witness:
    """``H > K`` whose positive parts have non-nested supports.

    ``H = P``, ``K = εQ - (I - Q)`` with ``P = diag(1, 0)`` and ``Q`` the
    projection onto ``(1, 1)/√2``; ``det(H - K) = (1 - 3ε)/2``.
    """
    if not 0 < eps < 1 / 3:
        raise PreconditionError(f"eps must lie in (0, 1/3), got {eps}")
    eye = np.eye(2)
    p = np.array([[1.0, 0.0], [0.0, 0.0]])
    q = np.full((2, 2), 0.5)
    h, k = p, eps * q - (eye - q)
    d = h - k
    h_plus, _ = jordan_decompose(h)
    k_plus, _ = jordan_decompose(k)
    s_h, s_k = support_projection(h_plus), support_projection(k_plus)
    s_hk = support_projection(jordan_decompose(h + k)[0])
    meet = projection_meet(s_h, s_k)
    order = lowner_compare(s_h, s_k)
    return Witness(
        matrices={"P": p, "Q": q, "H": h, "K": k, "H_minus_K": d,
                  "s_H_plus": s_h, "s_K_plus": s_k, "s_HK_plus": s_hk, "meet": meet},
        scalars={
            "eps": eps,
            "det": float(np.linalg.det(d).real),
            "det_expected": (1 - 3 * eps) / 2,
            "trace": float(np.trace(d).real),
            "min_eig_H_minus_K": min_eig(d),
            "meet_norm": opnorm(meet),
            "margin": lowner_margin(s_h, s_k),
        },
        meta={
            "family": "lemma24",
            "H_greater_K": bool(min_eig(d) > 0),
            "support_order": order.relation.value,
            "support_geq": order.geq,
        },
    )
