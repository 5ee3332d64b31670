import pytest

from siegel_rankin.cusps import covers_group, crt_combine, dedup_double_cosets, full_group_class_count, kind_vectors
from siegel_rankin.errors import DomainError, GuardExceeded


@pytest.mark.parametrize("p", [3, 5, 7])
def test_n1_count_matches_full_enumeration(p):
    reps = dedup_double_cosets(1, p)
    assert len(reps) == full_group_class_count(p)
    assert covers_group(1, p, reps)


def test_crt_product():
    reps = crt_combine(15, 1)
    assert len(reps) == len(dedup_double_cosets(1, 3)) * len(dedup_double_cosets(1, 5))
    assert len(kind_vectors(reps)) == 4


def test_crt_needs_squarefree():
    with pytest.raises(DomainError):
        crt_combine(9, 1)


def test_coverage_guard():
    with pytest.raises(GuardExceeded):
        covers_group(2, 3, dedup_double_cosets(2, 3))


def test_n2_reps_are_symplectic_and_distinct():
    reps = dedup_double_cosets(2, 3)
    assert all(r.element.is_symplectic() for r in reps)
    assert {r.kind for r in reps} == {"m(s)", "m(s)eta"}
