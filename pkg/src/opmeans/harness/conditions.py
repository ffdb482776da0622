"""Randomized and structured checks of the operator log-convexity conditions.

Every condition is a pair ``(build, margin)``. ``build`` turns a positive
definite pair plus a random stream into a :class:`Witness` holding every input
the inequality needs; ``margin`` evaluates the inequality on those inputs and
returns a scale-normalized signed slack (negative means violated). Because the
witness is self-contained, replaying it reproduces the margin bit for bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..catalog import CatalogFunction, resolve_function
from ..errors import DomainError, OpMeansError
from ..hermitian import (
    apply_function,
    block2_margin,
    hermitian,
    inv_pd,
    lowner_margin,
    min_eig,
    random_pd,
    random_vector,
    scale_of,
)
from ..means import geometric, harmonic, parse_mean
from ..reprs import DecreasingRepr, MonotoneRepr, repr_from_json
from .report import ConditionReport, Status, TrialConfig, Witness

A_CONDITIONS = tuple(f"a{i}" for i in range(1, 14))
B_CONDITIONS = tuple(f"b{i}" for i in range(1, 11))
CONDITION_IDS = A_CONDITIONS + B_CONDITIONS + ("prop1_1", "prop4_1_fwd", "f2_14")

# conditions whose outcome must agree for every catalog function
A_COHERENT = ("a1", "a3", "a5", "a6", "a7", "a8", "a11", "a12")
B_COHERENT = ("b1", "b3", "b5", "b6", "b8")

_DEFAULT_SINGLE_MEAN = {"a4": "harm", "b4": "arith", "prop4_1_fwd": "geom"}
_MEMBERSHIP = {"a13": "decreasing", "b9": "monotone"}

# fixed positive scalar pairs for the numerical (non-operator) parts of a10/a12
_SCALAR_PAIRS = ((0.1, 0.4), (0.5, 2.0), (1.0, 3.0), (0.2, 5.0), (2.0, 8.0), (0.05, 20.0))


@dataclass(frozen=True)
class Context:
    """Serializable parameters a margin evaluation depends on."""

    means: tuple[str, ...]
    mean: str | None
    lambdas: tuple[float, ...]
    representation: dict | None

    def to_meta(self) -> dict:
        return {
            "means": list(self.means),
            "mean": self.mean,
            "lambdas": list(self.lambdas),
            "representation": self.representation,
        }

    @classmethod
    def from_meta(cls, meta: dict) -> "Context":
        return cls(tuple(meta.get("means", ())), meta.get("mean"),
                   tuple(meta.get("lambdas", ())), meta.get("representation"))


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _lift(f, x):
    return apply_function(f, x)


def _quad(x, v) -> float:
    return float(np.real(np.vdot(v, x @ v)))


def _log_quad(x, v) -> float:
    q = _quad(x, v)
    if not q > 0:
        raise DomainError(f"<ξ, f(A) ξ> = {q!r} is not positive; log undefined")
    return math.log(q)


def _midpoint_convex(fa, fb, fm) -> float:
    return lowner_margin(0.5 * (fa + fb), fm)


def _top_generalized(x, s):
    """Unit vector maximizing ``<v, X v> / <v, S v>`` for positive definite ``S``."""
    w, U = np.linalg.eigh(hermitian(s))
    isq = (U / np.sqrt(w)) @ U.conj().T
    _, V = np.linalg.eigh(hermitian(isq @ x @ isq))
    v = isq @ V[:, -1]
    return v / np.linalg.norm(v)


def _adversarial_vectors(fm, fa, fb, starts, sweeps: int = 8, concave: bool = False):
    """Vectors pushing ``2 log<v,FM v> - log<v,FA v> - log<v,FB v>`` toward its extreme.

    A fixed-point sweep on the stationarity condition: with the current ``v``
    form ``S = FA/<v,FA v> + FB/<v,FB v>`` and move to the top (bottom, when
    ``concave``) generalized eigenvector of ``(FM, S)``.
    """
    out = []
    for v in starts:
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        for _ in range(sweeps):
            qa, qb = _quad(fa, v), _quad(fb, v)
            if not (qa > 0 and qb > 0):
                break
            s = fa / qa + fb / qb
            if concave:
                v = _top_generalized(s, fm)
            else:
                v = _top_generalized(fm, s)
        out.append(v)
    return out


def _vector_family(w: Witness, fm, fa, fb, concave=False):
    base = [w.vectors[k] for k in ("xi", "eta") if k in w.vectors]
    return base + _adversarial_vectors(fm, fa, fb, base, concave=concave)


def _representation(f: CatalogFunction, ctx: Context, kind: str):
    if ctx.representation is not None:
        r = repr_from_json(ctx.representation)
    elif kind in f.representations:
        r = f.representations[kind]
    else:
        raise OpMeansError(f"no {kind} representation supplied for {f.name}")
    expected = DecreasingRepr if kind == "decreasing" else MonotoneRepr
    if not isinstance(r, expected):
        raise OpMeansError(f"expected a {kind} representation, got {type(r).__name__}")
    return r


def _membership(f, w: Witness, ctx: Context, kind: str) -> float:
    r = _representation(f, ctx, kind)
    grid = np.geomspace(1.0 / 64, 64.0, 13)
    fx, rx = f(grid), r(grid)
    err = float(np.max(np.abs(fx - rx) / np.maximum(1.0, np.abs(fx))))
    lift = _lift(r, w.matrices["A"])
    return min(-err, min_eig(lift) / scale_of(lift))


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def _unit(v):
    return v / np.linalg.norm(v)


def _base(a, b, rng, ctx: Context) -> Witness:
    dim = a.shape[0]
    return Witness(
        matrices={"A": hermitian(a), "B": hermitian(b)},
        vectors={
            "xi": _unit(random_vector(dim, rng)),
            "eta": _unit(random_vector(dim, rng)),
            "lambdas": np.asarray(ctx.lambdas, dtype=complex),
        },
        scalars={"a": float(np.exp(rng.uniform(-3, 3))), "b": float(np.exp(rng.uniform(-3, 3)))},
    )


def _build_default(a, b, rng, ctx):
    w = _base(a, b, rng, ctx)
    dim = a.shape[0]
    if dim > 0:
        w.matrices["W"] = random_pd(dim, rng, 1e2)
    return w


def _build_ordered(a, b, rng, ctx):
    """``A = B + D`` with ``D`` positive semidefinite (rank one half of the time)."""
    w = _base(a, b, rng, ctx)
    dim = a.shape[0]
    if rng.uniform() < 0.5:
        v = random_vector(dim, rng)
        d = np.outer(v, v.conj()) / np.vdot(v, v).real * float(np.exp(rng.uniform(-2, 1)))
    else:
        d = b * float(np.exp(rng.uniform(-2, 0)))
    w.matrices["B"] = hermitian(a)
    w.matrices["A"] = hermitian(a + d)
    return w


# ---------------------------------------------------------------------------
# margins
# ---------------------------------------------------------------------------


def _m_monotone(f, w, ctx, decreasing):
    fa, fb = _lift(f, w.matrices["A"]), _lift(f, w.matrices["B"])
    return lowner_margin(fb, fa) if decreasing else lowner_margin(fa, fb)


def _lifts(f, w):
    a, b = w.matrices["A"], w.matrices["B"]
    return _lift(f, a), _lift(f, b), _lift(f, 0.5 * (a + b))


def _m_all_means(f, w, ctx, upper):
    fa, fb, fm = _lifts(f, w)
    out = math.inf
    for ident in ctx.means:
        s = parse_mean(ident)(fa, fb)
        out = min(out, lowner_margin(s, fm) if upper else lowner_margin(fm, s))
    return out


def _m_one_mean(f, w, ctx, upper, cond):
    fa, fb, fm = _lifts(f, w)
    s = parse_mean(ctx.mean or _DEFAULT_SINGLE_MEAN[cond])(fa, fb)
    return lowner_margin(s, fm) if upper else lowner_margin(fm, s)


def _m_geom(f, w, ctx, upper):
    fa, fb, fm = _lifts(f, w)
    g = geometric(fa, fb)
    return lowner_margin(g, fm) if upper else lowner_margin(fm, g)


def _m_block(f, w, ctx, harm):
    a, b = w.matrices["A"], w.matrices["B"]
    fa, fb = _lift(f, a), _lift(f, b)
    mid = harmonic(a, b) if harm else 0.5 * (a + b)
    return block2_margin(fa, _lift(f, mid), fb)


def _m_riccati(f, w, ctx, reverse):
    fa, fb, fm = _lifts(f, w)
    lhs = hermitian(fm @ inv_pd(fb) @ fm)
    return lowner_margin(lhs, fa) if reverse else lowner_margin(fa, lhs)


def _lambda_candidates(w, fa, fb, fm, concave=False):
    lams = [float(x.real) for x in w.vectors["lambdas"]]
    lams += [1.0 / x for x in lams]
    na, nb = np.linalg.norm(fa, 2), np.linalg.norm(fb, 2)
    if na > 0 and nb > 0:
        lams.append(math.sqrt(nb / na))
    for v in _vector_family(w, fm, fa, fb, concave):
        qa, qb = _quad(fa, v), _quad(fb, v)
        if qa > 0 and qb > 0:
            lams.append(math.sqrt(qb / qa))
    return lams


def _m_balance(f, w, ctx, harm):
    a, b = w.matrices["A"], w.matrices["B"]
    fa, fb = _lift(f, a), _lift(f, b)
    fm = _lift(f, harmonic(a, b) if harm else 0.5 * (a + b))
    return min(
        lowner_margin(0.5 * (lam * fa + fb / lam), fm)
        for lam in _lambda_candidates(w, fa, fb, fm)
    )


def _m_log_quad(f, w, ctx, concave):
    fa, fb, fm = _lifts(f, w)
    out = math.inf
    for v in _vector_family(w, fm, fa, fb, concave):
        gap = 0.5 * (_log_quad(fa, v) + _log_quad(fb, v)) - _log_quad(fm, v)
        out = min(out, -gap if concave else gap)
    return out


def _joint_gap(fa, fb, fm, xi, eta) -> float:
    m = 0.5 * (xi + eta)
    qa, qb, qm = _quad(fa, xi), _quad(fb, eta), _quad(fm, m)
    return (0.5 * (qa + qb) - qm) / max(1.0, abs(qa), abs(qb), abs(qm))


def _m_joint(f, w, ctx):
    fa, fb, fm = _lifts(f, w)
    xi, eta = w.vectors["xi"], w.vectors["eta"]
    out = _joint_gap(fa, fb, fm, xi, eta)
    # along one direction v the worst pair is (v, t v) with t = <v,FA v>/<v,FB v>
    for v in _vector_family(w, fm, fa, fb):
        qa, qb = _quad(fa, v), _quad(fb, v)
        if qa > 0 and qb > 0:
            out = min(out, _joint_gap(fa, fb, fm, v, (qa / qb) * v))
    return out


def _scalar_pairs(w):
    return _SCALAR_PAIRS + ((w.scalars["a"], w.scalars["b"]),)


def _m_scalar_logconvex(f, w):
    out = math.inf
    for a, b in _scalar_pairs(w):
        fa, fb, fm = f(np.array([a, b, 0.5 * (a + b)]))
        if not (fa > 0 and fb > 0 and fm > 0):
            raise DomainError(f"log f undefined: f takes value <= 0 near {a}, {b}")
        out = min(out, 0.5 * (math.log(fa) + math.log(fb)) - math.log(fm))
    return out


def _m_scalar_nonincreasing(f, w):
    out = math.inf
    for a, b in _scalar_pairs(w):
        lo, hi = min(a, b), max(a, b)
        flo, fhi = f(np.array([lo, hi]))
        out = min(out, (flo - fhi) / max(1.0, abs(flo), abs(fhi)))
    return out


def _m_a10(f, w, ctx):
    fa, fb, fm = _lifts(f, w)
    return min(_midpoint_convex(fa, fb, fm), _m_scalar_logconvex(f, w))


def _m_a11(f, w, ctx):
    fa, fb, fm = _lifts(f, w)

    def logf(x):
        y = f(x)
        if np.any(~(y > 0)):
            raise DomainError("log f undefined: f is not positive on the spectrum")
        return np.log(y)

    la, lb, lm = _lifts(logf, w)
    return min(_midpoint_convex(fa, fb, fm), _midpoint_convex(la, lb, lm))


def _m_a12(f, w, ctx):
    fa, fb, fm = _lifts(f, w)
    return min(_midpoint_convex(fa, fb, fm), _m_scalar_nonincreasing(f, w))


def _m_concave(f, w, ctx):
    fa, fb, fm = _lifts(f, w)
    return lowner_margin(fm, 0.5 * (fa + fb))


def _omega_values(x, w: Witness, vectors):
    vals = [float(np.trace(x).real), float(np.trace(w.matrices["W"] @ x).real)]
    vals += [_quad(x, v) for v in vectors]
    return vals


def _m_prop11(f, w, ctx):
    fa, fb, fm = _lifts(f, w)
    vectors = _vector_family(w, fm, fa, fb)
    out = math.inf
    for oa, ob, om in zip(*(_omega_values(x, w, vectors) for x in (fa, fb, fm))):
        if not (oa > 0 and ob > 0 and om > 0):
            raise DomainError("ω(f(A)) is not positive; log undefined")
        out = min(out, 0.5 * (math.log(oa) + math.log(ob)) - math.log(om))
    return out


def _m_prop41(f, w, ctx):
    a, b = w.matrices["A"], w.matrices["B"]
    s = parse_mean(ctx.mean or _DEFAULT_SINGLE_MEAN["prop4_1_fwd"])(a, b)
    return lowner_margin(_lift(f, 0.5 * (a + b)), _lift(f, s))


def _m_f214(f, w, ctx):
    a, b = w.matrices["A"], w.matrices["B"]
    fa, fb = _lift(f, a), _lift(f, b)
    out = math.inf
    for lam in (float(x.real) for x in w.vectors["lambdas"]):
        lhs = _lift(f, (1 - lam) * a + lam * b)
        out = min(out, lowner_margin(geometric(fa, fb, lam), lhs))
    return out


@dataclass(frozen=True)
class Condition:
    ident: str
    statement: str
    margin: Callable
    build: Callable = _build_default


CONDITIONS: dict[str, Condition] = {
    c.ident: c
    for c in [
        Condition("a1", "A >= B implies f(A) <= f(B)",
                  lambda f, w, c: _m_monotone(f, w, c, True), _build_ordered),
        Condition("a2", "f(A∇B) <= f(A) σ f(B) for all listed symmetric means",
                  lambda f, w, c: _m_all_means(f, w, c, True)),
        Condition("a3", "f(A∇B) <= f(A) # f(B)", lambda f, w, c: _m_geom(f, w, c, True)),
        Condition("a4", "f(A∇B) <= f(A) σ f(B) for one symmetric mean σ != ∇",
                  lambda f, w, c: _m_one_mean(f, w, c, True, "a4")),
        Condition("a5", "[[f(A), f(A∇B)], [f(A∇B), f(B)]] >= 0",
                  lambda f, w, c: _m_block(f, w, c, False)),
        Condition("a6", "f(A∇B) f(B)^-1 f(A∇B) <= f(A)",
                  lambda f, w, c: _m_riccati(f, w, c, False)),
        Condition("a7", "f(A∇B) <= (λ f(A) + f(B)/λ)/2 for all λ > 0",
                  lambda f, w, c: _m_balance(f, w, c, False)),
        Condition("a8", "A -> log<ξ, f(A) ξ> is midpoint convex",
                  lambda f, w, c: _m_log_quad(f, w, c, False)),
        Condition("a9", "(A, ξ) -> <ξ, f(A) ξ> is jointly midpoint convex", _m_joint),
        Condition("a10", "f operator convex and log f convex on scalars", _m_a10),
        Condition("a11", "f and log f operator convex", _m_a11),
        Condition("a12", "f operator convex and non-increasing on scalars", _m_a12),
        Condition("a13", "f = α + Σ w (λ+1)/(λ+x) with α >= 0, w > 0",
                  lambda f, w, c: _membership(f, w, c, "decreasing")),
        Condition("b1", "A >= B implies f(A) >= f(B)",
                  lambda f, w, c: _m_monotone(f, w, c, False), _build_ordered),
        Condition("b2", "f(A∇B) >= f(A) σ f(B) for all listed symmetric means",
                  lambda f, w, c: _m_all_means(f, w, c, False)),
        Condition("b3", "f(A∇B) >= f(A) # f(B)", lambda f, w, c: _m_geom(f, w, c, False)),
        Condition("b4", "f(A∇B) >= f(A) σ f(B) for one symmetric mean σ != !",
                  lambda f, w, c: _m_one_mean(f, w, c, False, "b4")),
        Condition("b5", "[[f(A), f(A!B)], [f(A!B), f(B)]] >= 0",
                  lambda f, w, c: _m_block(f, w, c, True)),
        Condition("b6", "f(A∇B) f(B)^-1 f(A∇B) >= f(A)",
                  lambda f, w, c: _m_riccati(f, w, c, True)),
        Condition("b7", "f(A!B) <= (λ f(A) + f(B)/λ)/2 for all λ > 0",
                  lambda f, w, c: _m_balance(f, w, c, True)),
        Condition("b8", "f is operator midpoint concave", _m_concave),
        Condition("b9", "f = α + βx + Σ w (λ+1)x/(λ+x) with α, β >= 0, w > 0",
                  lambda f, w, c: _membership(f, w, c, "monotone")),
        Condition("b10", "A -> log<ξ, f(A) ξ> is midpoint concave",
                  lambda f, w, c: _m_log_quad(f, w, c, True)),
        Condition("prop1_1", "A -> log ω(f(A)) is midpoint convex for ω in {tr, tr(W.), <ξ,.ξ>}",
                  _m_prop11),
        Condition("prop4_1_fwd", "f(A∇B) >= f(A σ B) for one symmetric mean σ != ∇", _m_prop41),
        Condition("f2_14", "f((1-λ)A + λB) <= f(A) #_λ f(B) on the λ grid", _m_f214),
    ]
}


# ---------------------------------------------------------------------------
# trial generation
# ---------------------------------------------------------------------------


def _embed(m2, dim):
    out = np.eye(dim, dtype=complex)
    k = min(dim, m2.shape[0])
    out[:k, :k] = m2[:k, :k]
    return out


def projection_pair(theta: float):
    """``P = diag(1, 0)`` and the rank-one projection at angle ``θ``."""
    c, s = math.cos(theta), math.sin(theta)
    p = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    q = np.array([[c * c, c * s], [c * s, s * s]], dtype=complex)
    return p, q


def structured_pairs(dim: int):
    """Deterministic pairs tried before random ones: scalar, commuting, and near-projection."""
    eye = np.eye(dim, dtype=complex)
    pairs = [(a * eye, b * eye) for a, b in ((0.5, 2.0), (1.0, 4.0), (0.2, 3.0), (3.0, 0.7))]
    if dim >= 2:
        d = np.geomspace(0.3, 3.0, dim)
        pairs.append((np.diag(d).astype(complex), np.diag(d[::-1]).astype(complex)))
        for theta in (0.3, 0.8, 1.2):
            p, q = projection_pair(theta)
            for c in (1.0, 4.0):
                e = 0.05 * np.eye(2)
                pairs.append((c * _embed(p + e, dim), c * _embed(q + e, dim)))
        p = np.array([[1.0, 0.0], [0.0, 0.0]])
        q = np.full((2, 2), 0.5)
        h, k = p, 0.1 * q - (np.eye(2) - q)
        pairs.append((_embed(np.eye(2) + 0.5 * h, dim), _embed(np.eye(2) + 0.5 * k, dim)))
    return pairs


def random_pair(dim: int, rng, cond_cap: float):
    a = random_pd(dim, rng, cond_cap) * float(np.exp(rng.uniform(-1.0, 1.5)))
    b = random_pd(dim, rng, cond_cap) * float(np.exp(rng.uniform(-1.0, 1.5)))
    return a, b


def _trial_specs(cfg: TrialConfig):
    specs = []
    for dim in cfg.dims:
        if cfg.structured:
            specs += [("structured", dim, i) for i in range(len(structured_pairs(dim)))]
        specs += [("random", dim, i) for i in range(cfg.trials_per_dim)]
    return specs


def _context(cond: str, cfg: TrialConfig) -> Context:
    mean = cfg.mean
    if mean is None and cond in _DEFAULT_SINGLE_MEAN:
        mean = _DEFAULT_SINGLE_MEAN[cond]
    return Context(tuple(cfg.means), mean, tuple(cfg.lambda_grid), cfg.representation)


def make_trial(cond: str, spec, cfg: TrialConfig, ctx: Context) -> Witness:
    kind, dim, idx = spec
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, dim, idx, 1 if kind == "structured" else 0]))
    if kind == "structured":
        a, b = structured_pairs(dim)[idx]
    else:
        a, b = random_pair(dim, rng, cfg.cond_cap)
    w = CONDITIONS[cond].build(a, b, rng, ctx)
    w.meta.update({"trial": kind, "dim": dim, "index": idx})
    return w


def evaluate(cond: str, f: CatalogFunction, w: Witness, ctx: Context) -> float:
    """Margin of one trial; matrix-domain errors count as a failed trial."""
    try:
        return float(CONDITIONS[cond].margin(f, w, ctx))
    except OpMeansError as exc:
        w.meta["error"] = str(exc)
        return -math.inf


def _stamp(w: Witness, cond: str, f: CatalogFunction, ctx: Context, margin: float):
    w.meta.update({"condition": cond, "function": f.name, **ctx.to_meta()})
    w.scalars["margin"] = margin
    return w


def classify(margin: float, cfg: TrialConfig) -> Status:
    tol = cfg.tol.tol_order
    if margin >= -tol:
        return Status.PASS
    if margin >= -cfg.inconclusive_factor * tol:
        return Status.INCONCLUSIVE
    return Status.FAIL


def check_condition(cond: str, f: CatalogFunction | str, cfg: TrialConfig | None = None) -> ConditionReport:
    """Run every structured and random trial of ``cond`` for ``f`` and keep the worst margin."""
    if cond not in CONDITIONS:
        raise KeyError(f"unknown condition {cond!r}")
    if isinstance(f, str):
        f = resolve_function(f)
    cfg = cfg or TrialConfig()
    ctx = _context(cond, cfg)
    if cond in _MEMBERSHIP:
        _representation(f, ctx, _MEMBERSHIP[cond])
    specs = _trial_specs(cfg)

    def run(spec):
        w = make_trial(cond, spec, cfg, ctx)
        return _stamp(w, cond, f, ctx, evaluate(cond, f, w, ctx))

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(run, specs))
    else:
        results = [run(s) for s in specs]

    worst = min(results, key=lambda w: w.scalars["margin"])
    margin = worst.scalars["margin"]
    status = classify(margin, cfg)
    diagnostics = sorted({w.meta["error"] for w in results if "error" in w.meta})
    return ConditionReport(cond, f.name, status, len(results), margin,
                           None if status is Status.PASS else worst, diagnostics)


def replay(w: Witness) -> float:
    """Re-evaluate a stored condition witness and return its margin."""
    cond = w.meta["condition"]
    f = resolve_function(w.meta["function"])
    ctx = Context.from_meta(w.meta)
    probe = Witness(dict(w.matrices), dict(w.vectors), dict(w.scalars), {})
    return evaluate(cond, f, probe, ctx)

