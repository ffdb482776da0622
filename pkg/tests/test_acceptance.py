"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (the lines are repeated
in the terminal summary) or ``python tests/test_acceptance.py``.
"""

import json
import math
import sys
import time

import numpy as np
import pytest

from opmeans.catalog import from_representation
from opmeans.cli import main as cli_main
from opmeans.hermitian import (
    hermitian,
    lowner_margin,
    opnorm,
    random_invertible,
    random_pd,
    scale_of,
    sqrt_pd,
)
from opmeans.means import (
    alm_geometric,
    arithmetic,
    geometric,
    harmonic,
    n_arithmetic,
    n_harmonic,
    parse_mean,
    psd_extend,
)
from opmeans.harness import (
    A_COHERENT,
    B_COHERENT,
    TrialConfig,
    Witness,
    check_condition,
    decompose_closed_form,
    decompose_mean_pair,
    decomposition_residuals,
    lemma22_witness,
    lemma24_witness,
    prop41_chain,
    replay_witness,
)
from opmeans.harness.conditions import projection_pair
from opmeans.reprs import DecreasingRepr, MonotoneRepr, decreasing_to_monotone_transform

DIMS = (2, 3, 4, 6)
GRID = 2.0 ** np.arange(-6, 7)
MEASURE_MEANS = ('measure:{"alpha":0.5,"atoms":[[1.0,0.5]]}',
                 'measure:{"alpha":0.0,"atoms":[[0.5,0.5],[2.0,0.5]]}')


@pytest.fixture
def record(request, capsys):
    def _record(number: int, title: str, ok: bool, detail: str):
        line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        request.config.stash.setdefault(ACCEPTANCE_KEY, []).append((number, line))
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return _record


ACCEPTANCE_KEY = pytest.StashKey[list]()


def _rng(*key):
    return np.random.default_rng(np.random.SeedSequence([2024, *key]))


def test_01_agh_chain(record):
    start = time.perf_counter()
    worst = math.inf
    for dim in DIMS:
        rng = _rng(1, dim)
        for _ in range(200):
            a, b = random_pd(dim, rng, 1e3), random_pd(dim, rng, 1e3)
            g = geometric(a, b)
            worst = min(worst, lowner_margin(arithmetic(a, b), g), lowner_margin(g, harmonic(a, b)))
    elapsed = time.perf_counter() - start
    record(1, "AGH chain", worst >= -1e-9 and elapsed < 5.0,
           f"worst margin {worst:.3e} (>= -1e-9), {elapsed:.2f}s (< 5s)")


def test_02_transformer_identity(record):
    worst = 0.0
    for ident in ("arith", "harm", "geom") + MEASURE_MEANS:
        sigma = parse_mean(ident)
        rng = _rng(2)
        for i in range(100):
            dim = DIMS[i % len(DIMS)]
            a, b = random_pd(dim, rng, 1e3), random_pd(dim, rng, 1e3)
            x = random_invertible(dim, rng, 10.0)
            xs = x.conj().T
            lhs = xs @ sigma(a, b) @ x
            rhs = sigma(hermitian(xs @ a @ x), hermitian(xs @ b @ x))
            worst = max(worst, opnorm(lhs - rhs) / scale_of(lhs, rhs))
    record(2, "transformer identity", worst < 1e-8, f"max relative error {worst:.3e} (< 1e-8)")


def _cli_exit(cond, fn):
    import contextlib
    import io

    with contextlib.redirect_stdout(io.StringIO()):
        return cli_main(["check", "--cond", cond, "--fn", fn])


def test_03_log_convex_coherence(record):
    cfg = TrialConfig()
    problems = []
    for fn in ("pow:-1", "pow:-0.5", "recip-shift:1", "const:2"):
        for cond in A_COHERENT:
            r = check_condition(cond, fn, cfg)
            if not r.passed:
                problems.append(f"{cond}/{fn} {r.status.value} {r.worst_margin:.2e}")
        if _cli_exit("a3", fn) != 0:
            problems.append(f"exit code a3/{fn}")
    for fn in ("pow:2", "pow:1.5", "exp"):
        r = check_condition("a3", fn, cfg)
        if r.passed or r.witness is None:
            problems.append(f"a3/{fn} did not fail")
            continue
        back = Witness.from_json(json.loads(json.dumps(r.witness.to_json())))
        if replay_witness(back) != r.worst_margin:
            problems.append(f"a3/{fn} witness does not replay")
        if _cli_exit("a3", fn) != 1:
            problems.append(f"exit code a3/{fn}")
    record(3, "log-convex coherence", not problems,
           "; ".join(problems) or "4 functions pass 8 conditions, 3 fail a3 with replayable witnesses, exit codes 0/1")


def test_04_log_concave_coherence(record):
    cfg = TrialConfig()
    problems = []
    for fn in ("pow:0.5", "log1p", "pow:1"):
        for cond in B_COHERENT:
            r = check_condition(cond, fn, cfg)
            if not r.passed:
                problems.append(f"{cond}/{fn} {r.status.value} {r.worst_margin:.2e}")
    r = check_condition("b3", "pow:2", cfg)
    if r.passed or r.witness is None:
        problems.append("b3/pow:2 did not fail")
    elif replay_witness(Witness.from_json(r.witness.to_json())) != r.worst_margin:
        problems.append("b3/pow:2 witness does not replay")
    record(4, "log-concave coherence", not problems,
           "; ".join(problems) or f"3 functions pass 5 conditions, x^2 fails b3 (margin {r.worst_margin:.2e})")


def test_05_lemma22_witness(record):
    w = lemma22_witness(0.05, 1e-4, "harm")
    bound = w.scalars["bound"]
    margins = {t: lemma22_witness(t, 1e-4, "harm").margin for t in (0.05, 0.3)}
    ok = bound >= 0.995 and all(m < -1e-3 for m in margins.values())
    record(5, "projection-pair witness", ok,
           f"bound at θ=0.05 is {bound:.6f} (>= 0.995); margins "
           + ", ".join(f"θ={t}: {m:.3e}" for t, m in margins.items()) + " (< -1e-3)")


def test_06_lemma24_witness(record):
    details, ok = [], True
    for eps in (0.05, 0.1, 0.2):
        w = lemma24_witness(eps)
        err = abs(w.scalars["det"] - (1 - 3 * eps) / 2)
        ok &= err <= 1e-12 and w.meta["H_greater_K"] and not w.meta["support_geq"]
        details.append(f"ε={eps}: det err {err:.1e}, H>K {w.meta['H_greater_K']}, "
                       f"s(H+)>=s(K+) {w.meta['support_geq']}")
    record(6, "support-order witness", ok, "; ".join(details))


def test_07_decomposition(record):
    worst = {"arith": 0.0, "mean": 0.0, "agree": 0.0}
    for mean in ("harm", "geom"):
        rng = _rng(7, 0 if mean == "harm" else 1)
        for i in range(50):
            dim = DIMS[i % len(DIMS)]
            x = random_pd(dim, rng, 1e2) * float(np.exp(rng.uniform(-1, 1)))
            w = random_pd(dim, rng, 1e2)
            w = w / np.linalg.eigvalsh(w)[-1]
            t = rng.uniform(0.05, 0.95)
            s = sqrt_pd(x)
            y = hermitian(s @ ((1 - t) * np.eye(dim) + t * w) @ s)
            a, b = decompose_mean_pair(mean, x, y)
            res = decomposition_residuals(mean, x, y, a, b)
            a2, b2 = decompose_closed_form(mean, x, y)
            worst["arith"] = max(worst["arith"], res["arith_residual"])
            worst["mean"] = max(worst["mean"], res["mean_residual"])
            worst["agree"] = max(worst["agree"], max(opnorm(a - a2), opnorm(b - b2)) / scale_of(x))
    ok = worst["arith"] < 1e-9 and worst["mean"] < 1e-7 and worst["agree"] < 1e-6
    record(7, "mean-pair decomposition", ok,
           f"∇ residual {worst['arith']:.2e} (< 1e-9), σ residual {worst['mean']:.2e} (< 1e-7), "
           f"path agreement {worst['agree']:.2e} (< 1e-6)")


def test_08_chain(record):
    worst_margin, worst_decay = math.inf, 0.0
    rng = _rng(8)
    for i in range(20):
        dim = DIMS[i % len(DIMS)]
        y = random_pd(dim, rng, 1e2)
        x = y + random_pd(dim, rng, 1e2) * float(rng.uniform(0.1, 2.0))
        r = prop41_chain("geom", "pow:0.5", x, y, 0.6)
        for s in r.steps:
            worst_margin = min(worst_margin, s.upper_margin, s.lower_margin, s.monotone_margin)
            worst_decay = max(worst_decay, s.decay_error)
    ok = worst_margin >= -1e-9 and worst_decay <= 1e-12
    record(8, "interpolation chain", ok,
           f"worst sandwich/monotone margin {worst_margin:.2e} (>= -1e-9), "
           f"decay error {worst_decay:.2e} (<= 1e-12)")


def test_09_representations(record):
    recip = DecreasingRepr(0.0, ((0.0, 1.0),))
    err_recip = float(np.max(np.abs(recip(GRID) - 1 / GRID)))
    rng = _rng(9)
    err_transform = 0.0
    for _ in range(50):
        nu = tuple((float(rng.uniform(0.01, 20)), float(rng.uniform(0.01, 3)))
                   for _ in range(rng.integers(0, 4)))
        alpha, beta = float(rng.uniform(0, 2)), float(rng.uniform(0, 2))
        g = MonotoneRepr(alpha, beta, nu)
        f = decreasing_to_monotone_transform(nu, alpha, beta)
        err_transform = max(err_transform, float(np.max(np.abs(f(GRID) - g(1 / GRID)))))
    reprs = [recip, DecreasingRepr(2.0), DecreasingRepr(0.0, ((1.0, 0.5),))]
    for _ in range(3):
        atoms = tuple((float(rng.uniform(0, 10)), float(rng.uniform(0.1, 2))) for _ in range(3))
        reprs.append(DecreasingRepr(float(rng.uniform(0, 1)), atoms))
    failing = [r for r in reprs if not check_condition("a1", from_representation(r)).passed]
    ok = err_recip <= 1e-12 and err_transform < 1e-12 and not failing
    record(9, "representation machinery", ok,
           f"1/x error {err_recip:.1e}, transform round trip {err_transform:.1e}, "
           f"{len(reprs) - len(failing)}/{len(reprs)} decreasing lifts pass a1")


def test_10_psd_extension(record):
    sigma = parse_mean("harm")
    worst_norm, monotone = 0.0, True
    cases = []
    for theta in (0.3, 0.8, 1.2):
        p, q = projection_pair(theta)
        cases.append((p, q))
        big_p, big_q = np.zeros((4, 4), complex), np.zeros((4, 4), complex)
        big_p[:2, :2], big_q[:2, :2] = p, q
        big_p[2, 2], big_q[3, 3] = 1.0, 1.0
        cases.append((big_p, big_q))
    for p, q in cases:
        ext = psd_extend(sigma, p, q)
        worst_norm = max(worst_norm, opnorm(ext.value))
        monotone &= all(g1 < g0 for g0, g1 in zip(ext.gaps, ext.gaps[1:]))
    record(10, "PSD extension", worst_norm < 1e-5 and monotone,
           f"max norm {worst_norm:.2e} (< 1e-5), gaps shrinking: {monotone}")


def test_11_alm(record):
    start = time.perf_counter()
    rng = _rng(11)
    comm_err = 0.0
    for dim in (2, 3, 4):
        u = random_invertible(dim, rng, 1.0)
        ds = [np.exp(rng.uniform(-2, 2, dim)) for _ in range(3)]
        mats = [hermitian((u * d) @ u.conj().T) for d in ds]
        want = hermitian((u * np.cbrt(ds[0] * ds[1] * ds[2])) @ u.conj().T)
        comm_err = max(comm_err, opnorm(alm_geometric(mats) - want) / scale_of(want))
    worst = math.inf
    for i in range(10):
        dim = (2, 3, 4)[i % 3]
        mats = [random_pd(dim, rng, 1e2) for _ in range(3)]
        g = alm_geometric(mats)
        worst = min(worst, lowner_margin(n_arithmetic(mats), g), lowner_margin(g, n_harmonic(mats)))
    elapsed = time.perf_counter() - start
    ok = comm_err <= 1e-10 and worst >= -1e-8 and elapsed < 10.0
    record(11, "ALM n-mean", ok,
           f"commuting error {comm_err:.1e} (<= 1e-10), A>=G>=H margin {worst:.2e} (>= -1e-8), "
           f"{elapsed:.2f}s (< 10s)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
