"""Condition checks, counterexample search, explicit witnesses and mean decompositions."""

from .conditions import (
    A_COHERENT,
    B_COHERENT,
    CONDITION_IDS,
    CONDITIONS,
    check_condition,
    replay,
)
from .decompose import (
    ChainReport,
    decompose_closed_form,
    decompose_mean_pair,
    decomposition_residuals,
    gamma0,
    phi,
    phi_inverse,
    prop41_chain,
)
from .falsify import TEMPLATES, FalsifyResult, falsify, replay_witness
from .report import ConditionReport, Status, TrialConfig, Witness
from .witnesses import lemma22_bound, lemma22_witness, lemma24_witness

__all__ = [
    "A_COHERENT", "B_COHERENT", "CONDITION_IDS", "CONDITIONS", "TEMPLATES",
    "ChainReport", "ConditionReport", "FalsifyResult", "Status", "TrialConfig", "Witness",
    "check_condition", "decompose_closed_form", "decompose_mean_pair",
    "decomposition_residuals", "falsify", "gamma0", "lemma22_bound", "lemma22_witness",
    "lemma24_witness", "phi", "phi_inverse", "prop41_chain", "replay", "replay_witness",
]
