"""Search for a counterexample to a condition or to one of the fixed inequality templates.

Structured families are always tried before random ones, and the search stops
at the first trial whose margin is below ``-tol_order``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..catalog import CatalogFunction, resolve_function
from ..hermitian import (
    jordan_decompose,
    lowner_margin,
    random_pd,
    support_projection,
)
from ..means import parse_mean
from . import conditions as C
from .report import TrialConfig, Witness
from .witnesses import lemma22_witness, lemma24_witness

EXTRA_TEMPLATES = ("f2_13", "lemma22")
TEMPLATES = C.CONDITION_IDS + EXTRA_TEMPLATES

_LEMMA24_EPS = (0.1, 0.05, 0.2)
_LEMMA22_THETAS = (0.05, 0.3, 0.8, 1.2)


@dataclass
class FalsifyResult:
    template: str
    function: str | None
    found: bool
    tried: int
    witness: Witness | None = None

    def to_json(self) -> dict:
        out = {"template": self.template, "function": self.function,
               "found": self.found, "tried": self.tried}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def _ordered_specs(cfg: TrialConfig):
    specs = C._trial_specs(cfg)
    return [s for s in specs if s[0] == "structured"] + [s for s in specs if s[0] == "random"]


def _support_order_witness(h, k) -> Witness:
    """``H >= K`` should give ``s(H_plus) >= s(K_plus)``; margin of that claim."""
    s_h = support_projection(jordan_decompose(h)[0])
    s_k = support_projection(jordan_decompose(k)[0])
    return Witness(
        matrices={"H": h, "K": k, "s_H_plus": s_h, "s_K_plus": s_k},
        scalars={"order_margin": lowner_margin(h, k), "margin": lowner_margin(s_h, s_k)},
        meta={"template": "f2_13"},
    )


def _support_order_candidates(cfg: TrialConfig):
    for eps in _LEMMA24_EPS:
        w = lemma24_witness(eps)
        yield _support_order_witness(w.matrices["H"], w.matrices["K"])
    for dim in cfg.dims:
        for idx in range(cfg.trials_per_dim):
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, dim, idx, 2]))
            h = random_pd(dim, rng, cfg.cond_cap) - random_pd(dim, rng, cfg.cond_cap)
            k = h - random_pd(dim, rng, cfg.cond_cap) * float(rng.uniform(0.01, 1.0))
            yield _support_order_witness(h, k)


def _lemma22_pair(a, b, mean: str) -> Witness:
    """``(A ∇ B)² <= A² σ B²`` on one pair."""
    sigma = parse_mean(mean)
    m = 0.5 * (a + b)
    return Witness(
        matrices={"A": a, "B": b},
        scalars={"margin": lowner_margin(sigma(a @ a, b @ b), m @ m)},
        meta={"template": "lemma22", "mean": sigma.name},
    )


def _lemma22_candidates(cfg: TrialConfig):
    mean = cfg.mean or "harm"
    for theta in _LEMMA22_THETAS:
        w = lemma22_witness(theta, 1e-4, mean)
        yield _lemma22_pair(w.matrices["P"] + 1e-4 * np.eye(2), w.matrices["Q"] + 1e-4 * np.eye(2), mean)
    for dim in cfg.dims:
        for idx in range(cfg.trials_per_dim):
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, dim, idx, 3]))
            yield _lemma22_pair(*C.random_pair(dim, rng, cfg.cond_cap), mean)


def falsify(template: str, f: CatalogFunction | str | None = None,
            cfg: TrialConfig | None = None) -> FalsifyResult:
    """Return the first violating trial of ``template`` (for ``f`` when it takes one)."""
    cfg = cfg or TrialConfig()
    tol = cfg.tol.tol_order
    if template in EXTRA_TEMPLATES:
        gen = _support_order_candidates(cfg) if template == "f2_13" else _lemma22_candidates(cfg)
        tried = 0
        for w in gen:
            tried += 1
            if template == "f2_13" and w.scalars["order_margin"] < -tol:
                continue
            if w.margin < -tol:
                return FalsifyResult(template, None, True, tried, w)
        return FalsifyResult(template, None, False, tried)

    if template not in C.CONDITIONS:
        raise KeyError(f"unknown template {template!r}")
    if f is None:
        raise ValueError(f"template {template} needs a function")
    if isinstance(f, str):
        f = resolve_function(f)
    ctx = C._context(template, cfg)
    if template in C._MEMBERSHIP:
        C._representation(f, ctx, C._MEMBERSHIP[template])
    tried = 0
    for spec in _ordered_specs(cfg):
        tried += 1
        w = C.make_trial(template, spec, cfg, ctx)
        margin = C.evaluate(template, f, w, ctx)
        if margin < -tol:
            return FalsifyResult(template, f.name, True, tried, C._stamp(w, template, f, ctx, margin))
    return FalsifyResult(template, f.name, False, tried)


def replay_witness(w: Witness) -> float:
    """Recompute the margin of any witness produced by this package."""
    meta = w.meta
    if "condition" in meta:
        return C.replay(w)
    family = meta.get("family") or meta.get("template")
    if family == "lemma22" and "theta" in w.scalars:
        return lemma22_witness(w.scalars["theta"], w.scalars["eps"], meta.get("mean", "harm")).margin
    if family == "lemma24":
        return lemma24_witness(w.scalars["eps"]).margin
    if family == "lemma22":
        return _lemma22_pair(w.matrices["A"], w.matrices["B"], meta["mean"]).margin
    if family == "f2_13":
        return _support_order_witness(w.matrices["H"], w.matrices["K"]).margin
    raise KeyError("witness carries no replayable condition or family")
