import json
import math

import numpy as np
import pytest

from opmeans.errors import PreconditionError
from opmeans.harness import Witness, lemma22_bound, lemma22_witness, lemma24_witness, replay_witness


def test_bound_values(frozen):
    assert lemma22_bound(math.pi / 3) == pytest.approx(frozen["lemma22_bound_pi_over_3"], abs=1e-15)
    for theta, want in frozen["lemma22_bound"].items():
        assert lemma22_bound(float(theta)) == pytest.approx(want, abs=1e-15)
    assert lemma22_bound(1e-4) > 1 - 1e-8


def test_bound_tends_to_one():
    vals = [lemma22_bound(t) for t in (1.0, 0.5, 0.1, 0.01)]
    assert vals == sorted(vals) and vals[-1] > 0.9999


def test_lemma22_structure(frozen):
    w = lemma22_witness(0.3, 1e-4, "harm")
    m = w.matrices
    assert np.allclose(m["meet"], 0)
    assert np.allclose(m["PvQ_sq"], m["quarter_form"], atol=1e-15)
    assert w.scalars["margin"] == pytest.approx(frozen["lemma22_margin_harm"]["theta=0.3,eps=1e-4"], abs=1e-12)
    assert w.scalars["margin_squared"] == pytest.approx(
        frozen["lemma22_margin_squared_harm"]["theta=0.3,eps=1e-4"], abs=1e-12)
    assert w.meta["violated"]
    # α = 0 for the harmonic mean, so 2α - 1 = -1 is far below the forced bound
    assert w.scalars["alpha"] == pytest.approx(0.0, abs=1e-12)
    assert w.scalars["f26_margin"] < 0
    assert np.linalg.norm(m["P_sigma_Q"], 2) < 1e-5


def test_lemma22_arithmetic_mean_is_not_violated():
    w = lemma22_witness(0.3, 1e-4, "arith")
    assert w.scalars["alpha"] == pytest.approx(1.0)
    assert w.scalars["f26_margin"] > -1e-12


@pytest.mark.parametrize("theta", [0.0, math.pi / 2, -0.1, 2.0])
def test_lemma22_range(theta):
    with pytest.raises(PreconditionError):
        lemma22_witness(theta, 1e-4)
    with pytest.raises(PreconditionError):
        lemma22_witness(0.3, 0.0)


def test_lemma24_values(frozen):
    for eps, det in frozen["lemma24_det"].items():
        w = lemma24_witness(float(eps))
        assert abs(w.scalars["det"] - det) < 1e-12
        assert w.meta["H_greater_K"] and not w.meta["support_geq"]
    w = lemma24_witness(0.1)
    assert np.allclose(w.matrices["s_H_plus"], np.diag([1, 0]))
    assert np.allclose(w.matrices["s_K_plus"], np.full((2, 2), 0.5))
    assert np.allclose(w.matrices["meet"], 0)
    assert w.scalars["trace"] == pytest.approx(2 - 0.1)
    assert lemma24_witness(1 / 3 - 1e-9).scalars["det"] == pytest.approx(0, abs=1e-8)


@pytest.mark.parametrize("eps", [0.0, 1 / 3, 0.5, -1.0])
def test_lemma24_range(eps):
    with pytest.raises(PreconditionError):
        lemma24_witness(eps)


def test_replay_through_json():
    for w in (lemma22_witness(0.8, 1e-3, "geom"), lemma24_witness(0.2)):
        back = Witness.from_json(json.loads(json.dumps(w.to_json())))
        assert replay_witness(back) == w.margin
