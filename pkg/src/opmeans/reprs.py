"""Atomic integral representations of operator monotone / decreasing / convex functions.

Three families, each a finite sum of closed-form kernels:

* ``GeneralConvexRepr``: ``α + βx + γx² + Σ w (λ+1)x²/(λ+x)``
* ``DecreasingRepr``:    ``α + Σ w (λ+1)/(λ+x)``   (atom at ``λ = 0`` allowed)
* ``MonotoneRepr``:      ``α + βx + Σ w (λ+1)x/(λ+x)``
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError


def _atoms(atoms, allow_zero: bool) -> tuple[tuple[float, float], ...]:
    out = []
    for lam, w in atoms:
        lam, w = float(lam), float(w)
        if not (lam >= 0 if allow_zero else lam > 0):
            raise ValueError(f"atom location {lam} out of range")
        if not w > 0:
            raise ValueError(f"atom weight {w} must be positive")
        out.append((lam, w))
    return tuple(out)


def _positive(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("representations are evaluated at x > 0 only")
    return x


@dataclass(frozen=True)
class GeneralConvexRepr:
    alpha: float
    beta: float
    gamma: float = 0.0
    atoms: tuple = ()

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        object.__setattr__(self, "atoms", _atoms(self.atoms, allow_zero=False))

    def __call__(self, x):
        x = _positive(x)
        out = self.alpha + self.beta * x + self.gamma * x**2
        for lam, w in self.atoms:
            out = out + w * (lam + 1) * x**2 / (lam + x)
        return out


@dataclass(frozen=True)
class DecreasingRepr:
    alpha: float = 0.0
    atoms: tuple = ()

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        object.__setattr__(self, "atoms", _atoms(self.atoms, allow_zero=True))

    def __call__(self, x):
        x = _positive(x)
        out = np.full_like(x, self.alpha)
        for lam, w in self.atoms:
            out = out + w * (lam + 1) / (lam + x)
        return out


@dataclass(frozen=True)
class MonotoneRepr:
    alpha: float = 0.0
    beta: float = 0.0
    atoms: tuple = ()

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")
        object.__setattr__(self, "atoms", _atoms(self.atoms, allow_zero=False))

    def __call__(self, x):
        x = _positive(x)
        out = self.alpha + self.beta * x
        for lam, w in self.atoms:
            out = out + w * (lam + 1) * x / (lam + x)
        return out


Representation = Union[GeneralConvexRepr, DecreasingRepr, MonotoneRepr]

_KINDS = {"convex": GeneralConvexRepr, "decreasing": DecreasingRepr, "monotone": MonotoneRepr}


def eval_repr(r: Representation, x):
    """Evaluate a representation at ``x > 0`` (scalar or array)."""
    out = r(x)
    return float(out) if np.ndim(out) == 0 else out


def decreasing_to_monotone_transform(nu_atoms, alpha: float, beta: float) -> DecreasingRepr:
    """Turn the monotone representation of ``g(x) = f(1/x)`` into one of ``f``.

    ``g(x) = α + βx + Σ w (λ+1)x/(λ+x)`` becomes
    ``f(x) = α + β/x + Σ w (1/λ + 1)/(1/λ + x)``: each atom moves to ``1/λ``
    with the same weight and ``β`` becomes an atom at 0.
    """
    g = MonotoneRepr(alpha, beta, nu_atoms)
    atoms = [(1.0 / lam, w) for lam, w in g.atoms]
    if beta > 0:
        atoms.insert(0, (0.0, beta))
    return DecreasingRepr(alpha, tuple(atoms))


def repr_to_json(r: Representation) -> dict:
    kind = {v: k for k, v in _KINDS.items()}[type(r)]
    out = {"kind": kind, "alpha": r.alpha, "atoms": [list(a) for a in r.atoms]}
    if hasattr(r, "beta"):
        out["beta"] = r.beta
    if hasattr(r, "gamma"):
        out["gamma"] = r.gamma
    return out


def repr_from_json(obj) -> Representation:
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj.get("kind")
    if kind not in _KINDS:
        raise ValueError(f"representation kind must be one of {sorted(_KINDS)}, got {kind!r}")
    atoms = tuple(tuple(a) for a in obj.get("atoms", []))
    alpha = float(obj.get("alpha", 0.0))
    if kind == "decreasing":
        return DecreasingRepr(alpha, atoms)
    if kind == "monotone":
        return MonotoneRepr(alpha, float(obj.get("beta", 0.0)), atoms)
    return GeneralConvexRepr(alpha, float(obj.get("beta", 0.0)), float(obj.get("gamma", 0.0)), atoms)
