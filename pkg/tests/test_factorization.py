from fractions import Fraction

import pytest

from config import config
from errors import ResourceError, StructuralError
from factorization import (
    bounds_report,
    determinize,
    model1,
    model2,
    model3,
    outcome_tuple,
    pauli_optimal_factorization,
    pauli_uncompressed_factorization,
    verify_of,
)
from models import DataTable, DeterminizeMode, DeterminizePolicy, OntFactorization, ViolationKind, as_grid
from table_core import binary_worst_case_table, rank

F = Fraction


def _weights_by_pattern(factorization, table, k):
    return {
        outcome_tuple(factorization, j, table.d, table.m): factorization.P[j][k]
        for j in range(factorization.omega)
        if factorization.P[j][k]
    }


def test_model1_is_identity(pauli):
    factorization = model1(pauli)
    assert factorization.omega == 6
    assert factorization.M == pauli.entries
    assert not factorization.deterministic
    assert verify_of(pauli, factorization).valid


def test_model2_product_weights(three_outcome):
    factorization = model2(three_outcome)
    assert factorization.omega == 9
    assert factorization.deterministic
    assert factorization.tuple_index[:4] == ((0, 0), (0, 1), (0, 2), (1, 0))
    assert factorization.M == as_grid([
        [1, 1, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 1, 1, 1, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, 1, 1],
        [1, 0, 0, 1, 0, 0, 1, 0, 0],
        [0, 1, 0, 0, 1, 0, 0, 1, 0],
        [0, 0, 1, 0, 0, 1, 0, 0, 1],
    ])
    assert factorization.P == as_grid([
        [0, "1/3"], [0, "1/3"], [0, 0],
        ["1/9", "1/6"], ["1/9", "1/6"], ["1/9", 0],
        ["2/9", 0], ["2/9", 0], ["2/9", 0],
    ])
    # state (1, 2) answers outcome 1 for measurement 0 and outcome 2 for measurement 1
    assert factorization.m_column(5) == as_grid([[0, 1, 0, 0, 0, 1]])[0]
    assert verify_of(three_outcome, factorization).valid


def test_model2_single_measurement():
    table = DataTable(d=2, m=1, s=1, entries=as_grid([["1/3"], ["2/3"]]))
    factorization = model2(table)
    assert factorization.M == as_grid([[1, 0], [0, 1]])
    assert factorization.P == as_grid([["1/3"], ["2/3"]])


def test_model2_cap(kernaghan):
    with pytest.raises(ResourceError, match="MODEL2_STATE_CAP"):
        model2(kernaghan, cap=1000)


def test_model3_preparation_merge(three_outcome):
    factorization = model3(three_outcome)
    assert factorization.omega == 6
    assert factorization.deterministic
    assert verify_of(three_outcome, factorization).valid
    assert _weights_by_pattern(factorization, three_outcome, 0) == {
        (1, 0): F(1, 3), (2, 1): F(1, 3), (2, 2): F(1, 3),
    }
    assert _weights_by_pattern(factorization, three_outcome, 1) == {
        (1, 0): F(1, 3), (0, 0): F(1, 6), (0, 1): F(1, 2),
    }


def test_model3_table_merge_shares_states(three_outcome):
    factorization = model3(three_outcome, merge="table")
    assert factorization.omega == 5
    assert verify_of(three_outcome, factorization).valid


def test_model3_rejects_unknown_merge(three_outcome):
    with pytest.raises(ValueError):
        model3(three_outcome, merge="everything")


def test_model3_deterministic_column_is_one_state():
    table = DataTable(d=3, m=2, s=1, entries=as_grid([[0], [1], [0], [0], [0], [1]]))
    factorization = model3(table)
    assert factorization.omega == 1
    assert factorization.P == as_grid([[1]])
    assert outcome_tuple(factorization, 0, 3, 2) == (1, 2)


def test_verify_reports_broken_factorizations(pauli, three_outcome):
    optimal = pauli_optimal_factorization()
    assert verify_of(pauli, optimal).valid

    broken_m = [list(row) for row in optimal.M]
    broken_m[0][0] = F(0)
    report = verify_of(pauli, OntFactorization.build(broken_m, optimal.P))
    kinds = {v.kind for v in report.violations}
    assert not report.valid
    assert {ViolationKind.M_COLUMN_SUM, ViolationKind.PRODUCT_MISMATCH} <= kinds

    flagged = optimal.model_copy(update={"deterministic": False})
    assert [v.kind for v in verify_of(pauli, flagged).violations] == [ViolationKind.DETERMINISTIC_FLAG]

    with pytest.raises(StructuralError):
        verify_of(three_outcome, optimal)


def test_determinize_replicas(two_preparation):
    factorization = determinize(two_preparation, model1(two_preparation))
    assert factorization.omega == 7
    assert factorization.deterministic
    assert verify_of(two_preparation, factorization).valid
    assert factorization.P == as_grid([["1/4", 0]] * 4 + [[0, "1/3"]] * 3)
    patterns = [outcome_tuple(factorization, j, 2, 2) for j in range(7)]
    assert patterns == [(0, 0), (0, 0), (1, 0), (1, 1), (0, 0), (0, 0), (1, 0)]


def test_determinize_leaves_deterministic_input_alone(pauli):
    optimal = pauli_optimal_factorization()
    assert determinize(pauli, optimal) is optimal


def test_determinize_seeded_random_is_reproducible(two_preparation):
    policy = DeterminizePolicy(mode=DeterminizeMode.SEEDED_RANDOM, seed=7)
    a = determinize(two_preparation, model1(two_preparation), policy)
    b = determinize(two_preparation, model1(two_preparation), policy)
    assert a == b
    assert a.omega == 7
    assert verify_of(two_preparation, a).valid


def test_determinize_kernaghan(kernaghan_deterministic, kernaghan):
    assert kernaghan_deterministic.omega == 80
    assert verify_of(kernaghan, kernaghan_deterministic).valid


def test_pauli_reference_factorizations(pauli):
    uncompressed = pauli_uncompressed_factorization()
    assert uncompressed.omega == 12
    assert verify_of(pauli, uncompressed).valid
    assert pauli_optimal_factorization().omega == rank(pauli)


def test_bounds_pauli(pauli):
    report = bounds_report(pauli)
    assert report.rank_lb == 4
    assert report.pattern_lb == 1
    assert report.lower == 4
    assert report.upper_indet == 6
    assert report.upper_det_model2 == 8
    assert report.upper_det_model3 == 8
    assert report.worst_case_bound == 6
    assert report.caratheodory_note == 7
    assert not report.upper_det_model2_saturated


def test_bounds_binary_worst_case():
    report = bounds_report(binary_worst_case_table(3))
    assert report.pattern_lb == 8
    assert report.lower == 8
    assert report.upper_det_model2 == 8
    assert report.upper_det_model3 == 8


def test_bounds_trivial_table():
    report = bounds_report(DataTable(d=2, m=1, s=1, entries=as_grid([[1], [0]])))
    assert report.lower == report.upper_indet == report.upper_det_model3 == 1


def test_bounds_saturate():
    table = DataTable(d=2, m=70, s=1, entries=as_grid([[1], [0]] * 70))
    report = bounds_report(table)
    assert report.upper_det_model2_saturated
    assert report.upper_det_model2 == config.BOUND_SATURATION
    assert report.upper_det_model3 == 1


def test_rank_never_exceeds_omega(pauli, three_outcome, two_preparation):
    for table in (pauli, three_outcome, two_preparation):
        for factorization in (model1(table), model2(table), model3(table), model3(table, merge="table")):
            assert rank(table) <= factorization.omega
