"""One test per acceptance criterion; a failure prints the measured values."""

import pytest

from mindet.acceptance import CRITERIA, run_criterion

IDS = [
    "c01_stieltjes_moment_invariance",
    "c02_finite_extent_autocorrelation",
    "c03_negative_control_small_lambda",
    "c04_moment_independence_condition",
    "c05_translation_charfun_identity",
    "c06_operator_family_translation",
    "c07_operator_family_gauged",
    "c08_flow_cross_validation",
    "c09_structural_suite",
    "c10_reduction_to_cosine_form",
]


def test_every_criterion_has_an_id():
    assert len(IDS) == len(CRITERIA)


@pytest.mark.parametrize("number,criterion", list(enumerate(CRITERIA, start=1)), ids=IDS)
def test_criterion(number, criterion):
    res = run_criterion(criterion)
    assert res.number == number
    assert res.passed, res.line()
