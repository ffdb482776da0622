"""Classified scalar functions used as harness inputs, and function identifiers."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .reprs import DecreasingRepr, MonotoneRepr, Representation, repr_from_json, repr_to_json

FLAG_NAMES = (
    "op_monotone",
    "op_monotone_decreasing",
    "op_convex",
    "op_concave",
    "op_log_convex",
    "op_log_concave",
)


@dataclass(frozen=True)
class CatalogFunction:
    evaluator: Callable[[np.ndarray], np.ndarray]
    name: str
    flags: dict = field(default_factory=dict)
    representations: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        with np.errstate(all="ignore"):
            return np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float)

    def flag(self, key: str):
        return self.flags.get(key)

    def to_json(self) -> dict:
        out = {"name": self.name, "flags": {k: self.flags.get(k) for k in FLAG_NAMES}}
        if self.representations:
            out["representations"] = {k: repr_to_json(r) for k, r in self.representations.items()}
        return out


def power_flags(alpha: float) -> dict:
    """Operator classification of ``x^α`` on ``(0, ∞)``."""
    mono = 0 <= alpha <= 1
    dec = -1 <= alpha <= 0
    return {
        "op_monotone": mono,
        "op_monotone_decreasing": dec,
        "op_convex": dec or 1 <= alpha <= 2,
        "op_concave": mono,
        # for nonnegative f: log-convex <=> monotone decreasing, log-concave <=> monotone
        "op_log_convex": dec,
        "op_log_concave": mono,
    }


_DECREASING_FLAGS = dict(zip(FLAG_NAMES, (None, True, True, None, True, None)))
_MONOTONE_FLAGS = dict(zip(FLAG_NAMES, (True, None, None, True, None, True)))
_NOTHING = dict.fromkeys(FLAG_NAMES, False)


def _fmt(x: float) -> str:
    return f"{x:g}"


def power(alpha: float) -> CatalogFunction:
    alpha = float(alpha)
    reps = {}
    if alpha == -1:
        reps["decreasing"] = DecreasingRepr(0.0, ((0.0, 1.0),))
    elif alpha == 0:
        reps["decreasing"] = DecreasingRepr(1.0)
        reps["monotone"] = MonotoneRepr(1.0)
    elif alpha == 1:
        reps["monotone"] = MonotoneRepr(0.0, 1.0)
    return CatalogFunction(lambda x: x**alpha, f"pow:{_fmt(alpha)}", power_flags(alpha), reps)


def constant(c: float) -> CatalogFunction:
    c = float(c)
    if c < 0:
        raise ValueError("constant functions in the catalog are nonnegative")
    reps = {"decreasing": DecreasingRepr(c), "monotone": MonotoneRepr(c)}
    flags = dict.fromkeys(FLAG_NAMES, True)
    return CatalogFunction(lambda x: np.full_like(np.asarray(x, dtype=float), c),
                           f"const:{_fmt(c)}", flags, reps)


def recip_shift(lam: float) -> CatalogFunction:
    """``1/(x + λ)``, a single-atom decreasing representation."""
    lam = float(lam)
    if not lam > 0:
        raise ValueError("shift must be positive")
    flags = dict(_DECREASING_FLAGS, op_monotone=False, op_concave=False, op_log_concave=False)
    reps = {"decreasing": DecreasingRepr(0.0, ((lam, 1.0 / (lam + 1)),))}
    return CatalogFunction(lambda x: 1.0 / (x + lam), f"recip-shift:{_fmt(lam)}", flags, reps)


def _logmean(x):
    x = np.asarray(x, dtype=float)
    d = x - 1
    near = np.abs(d) < 1e-4
    with np.errstate(divide="ignore", invalid="ignore"):
        far = d / np.log(x)
    series = 1 + d / 2 - d**2 / 12 + d**3 / 24
    return np.where(near, series, far)


LOG1P = CatalogFunction(np.log1p, "log1p",
                        dict(_MONOTONE_FLAGS, op_monotone_decreasing=False, op_convex=False,
                             op_log_convex=False))
EXP = CatalogFunction(np.exp, "exp", dict(_NOTHING))
LOGMEAN = CatalogFunction(_logmean, "logmean",
                          dict(_MONOTONE_FLAGS, op_monotone_decreasing=False, op_convex=False,
                               op_log_convex=False))


def from_representation(r: Representation) -> CatalogFunction:
    name = "repr:" + json.dumps(repr_to_json(r), separators=(",", ":"))
    if isinstance(r, DecreasingRepr):
        flags, kind = dict(_DECREASING_FLAGS), "decreasing"
    elif isinstance(r, MonotoneRepr):
        flags, kind = dict(_MONOTONE_FLAGS), "monotone"
    else:
        flags = dict.fromkeys(FLAG_NAMES)
        flags["op_convex"] = True
        kind = "convex"
    return CatalogFunction(r, name, flags, {kind: r})


def catalog() -> list[CatalogFunction]:
    """Reference functions with known operator classification.

    Includes negative controls (``x^{3/2}``, ``x²``, ``x³``, ``exp``) so that
    falsification paths get exercised.
    """
    powers = [power(a) for a in (-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0)]
    return powers + [LOG1P, recip_shift(1.0), constant(2.0), LOGMEAN, EXP]


def resolve_function(ident: str) -> CatalogFunction:
    """Map a function identifier (``pow:-0.5``, ``log1p``, ``repr:{...}``, ...) to a function."""
    ident = ident.strip()
    head, _, arg = ident.partition(":")
    try:
        if head == "pow":
            value = float(arg)
            if not math.isfinite(value):
                raise ValueError(arg)
            return power(value)
        if head == "recip-shift":
            return recip_shift(float(arg))
        if head == "const":
            return constant(float(arg))
        if head == "repr":
            return from_representation(repr_from_json(arg))
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise KeyError(f"bad function id {ident!r}: {exc}") from exc
    named = {"log1p": LOG1P, "exp": EXP, "logmean": LOGMEAN}
    if ident in named:
        return named[ident]
    raise KeyError(f"unknown function id {ident!r}")
