from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ..hermitian import ToleranceConfig
from ..matrix_io import matrix_from_json, matrix_to_json

DEFAULT_SYMMETRIC_MEANS = (
    "arith",
    "geom",
    "harm",
    'measure:{"alpha":0.5,"atoms":[[1.0,0.5]]}',
    'measure:{"alpha":0.0,"atoms":[[0.5,0.5],[2.0,0.5]]}',
)


@dataclass(frozen=True)
class TrialConfig:
    """How many randomized and structured trials a condition check runs.

    ``mean`` overrides the single mean used by the "for some mean" conditions
    (a4, b4, prop4_1_fwd); ``representation`` is the payload for the
    membership conditions a13/b9.
    """

    dims: tuple[int, ...] = (2, 3, 4, 6)
    trials_per_dim: int = 50
    seed: int = 0
    cond_cap: float = 1e3
    tol: ToleranceConfig = field(default_factory=ToleranceConfig)
    lambda_grid: tuple[float, ...] = (0.25, 0.5, 0.75)
    means: tuple[str, ...] = DEFAULT_SYMMETRIC_MEANS
    mean: str | None = None
    representation: dict | None = None
    structured: bool = True
    inconclusive_factor: float = 100.0
    workers: int = 1

    def __post_init__(self):
        if self.trials_per_dim < 0 or (self.trials_per_dim == 0 and not self.structured):
            raise ValueError("need at least one trial")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError("dims must be positive integers")
        if any(not 0 < lam < 1 for lam in self.lambda_grid):
            raise ValueError("lambda_grid values must lie in (0, 1)")
        if self.inconclusive_factor < 1:
            raise ValueError("inconclusive_factor must be >= 1")


class Status(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


def _num(x):
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class Witness:
    """Concrete inputs (and derived values) for one evaluated inequality."""

    matrices: dict = field(default_factory=dict)
    vectors: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.scalars.get("margin", float("nan"))

    def to_json(self) -> dict:
        return {
            "matrices": {k: matrix_to_json(v) for k, v in self.matrices.items()},
            "vectors": {k: matrix_to_json(v) for k, v in self.vectors.items()},
            "scalars": {k: _num(v) for k, v in self.scalars.items()},
            "meta": dict(self.meta),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Witness":
        def scalar(v):
            if v is None:
                return float("-inf")
            if isinstance(v, list):
                return tuple(float("-inf") if x is None else float(x) for x in v)
            return float(v)

        return cls(
            {k: matrix_from_json(v) for k, v in obj.get("matrices", {}).items()},
            {k: np.asarray(matrix_from_json(v)) for k, v in obj.get("vectors", {}).items()},
            {k: scalar(v) for k, v in obj.get("scalars", {}).items()},
            dict(obj.get("meta", {})),
        )


@dataclass
class ConditionReport:
    condition: str
    function: str
    status: Status
    trials: int
    worst_margin: float
    witness: Witness | None = None
    diagnostics: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def to_json(self) -> dict:
        out = {
            "condition": self.condition,
            "function": self.function,
            "pass": self.passed,
            "status": self.status.value,
            "trials": self.trials,
            "worst_margin": _num(self.worst_margin),
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.diagnostics:
            out["diagnostics"] = list(self.diagnostics)
        return out
