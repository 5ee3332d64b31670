"""All thirteen acceptance criteria at their stated tolerances, one line each."""
import pytest

from siegel_rankin.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = run_criterion(number, quick=False, seed=0)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
