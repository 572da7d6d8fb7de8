"""Acceptance criteria, one test per criterion, each printing a pass/fail line."""

import pytest

from quadmod.acceptance import CRITERIA, format_result, run_criterion


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"c{c.number:02d}_{c.module}")
def test_criterion(criterion, capsys):
    result = run_criterion(criterion)
    with capsys.disabled():
        print("\n" + format_result(result))
    assert result.passed, result.detail
