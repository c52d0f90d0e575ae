from fractions import Fraction

import pytest

from compression import (
    block_uniform,
    compress_method1,
    compress_method2,
    dedupe,
    exhaustive_method1,
    grid_distribution,
    grid_marginal,
    grid_move,
    method1_restart,
)
from errors import ResourceError, StructuralError
from factorization import (
    determinize,
    model1,
    model2,
    model3,
    pauli_optimal_factorization,
    pauli_uncompressed_factorization,
    verify_of,
)
from analysis import psi_classify
from models import CompressionParams, DataTable, GridDistribution, OntFactorization, as_grid
from table_core import rank

F = Fraction


def _states(factorization):
    """Ontic states as (M column, P row) pairs, independent of column order."""
    return {(factorization.m_column(j), factorization.P[j]) for j in range(factorization.omega)}


@pytest.fixture(scope="module")
def pauli_uniform(pauli):
    return block_uniform(pauli, determinize(pauli, model1(pauli)))


def test_dedupe_pauli(pauli):
    uncompressed = pauli_uncompressed_factorization()
    merged = dedupe(pauli, uncompressed)
    assert merged.omega == 8
    assert verify_of(pauli, merged).valid
    # states 0 and 4 share a column: X+ and Y+ weights add up in one row
    assert merged.P[0] == as_grid([["1/2", 0, "1/2", 0, 0, 0]])[0]
    assert dedupe(pauli, merged) is merged


def test_dedupe_sums_weights():
    M = [[1, 1, 0, 0], [0, 0, 1, 1]]
    P = [["1/4", 0], [0, "1/3"], ["3/4", 0], [0, "2/3"]]
    table = DataTable(d=2, m=1, s=2, entries=as_grid([["1/4", "1/3"], ["3/4", "2/3"]]))
    merged = dedupe(table, OntFactorization.build(as_grid(M), as_grid(P)))
    assert merged.omega == 2
    assert merged.P == as_grid([["1/4", "1/3"], ["3/4", "2/3"]])
    assert verify_of(table, merged).valid


def test_block_uniform_blocks(pauli_uniform):
    assert pauli_uniform.base.omega == 12
    assert pauli_uniform.blocks == tuple((2 * k, 2 * k + 1) for k in range(6))


def test_block_uniform_rejects_non_uniform_weights(three_outcome):
    with pytest.raises(StructuralError, match="non-uniform"):
        block_uniform(three_outcome, model3(three_outcome))


def test_block_uniform_rejects_indeterministic(pauli):
    with pytest.raises(StructuralError):
        block_uniform(pauli, model1(pauli))


def test_exhaustive_pauli_finds_four_state_model(pauli, pauli_uniform):
    result = exhaustive_method1(pauli, pauli_uniform)
    assert result.omega == 4
    assert verify_of(pauli, result).valid
    assert _states(result) == _states(pauli_optimal_factorization())


def test_exhaustive_cap(pauli, pauli_uniform):
    with pytest.raises(ResourceError, match="exhaustive_cap"):
        exhaustive_method1(pauli, pauli_uniform, CompressionParams(exhaustive_cap=100))


def test_exhaustive_needs_a_factorization_of_the_table(pauli, pauli_uniform):
    other = pauli.model_copy(update={"entries": tuple(reversed(pauli.entries))})
    with pytest.raises(StructuralError, match="does not reproduce"):
        exhaustive_method1(other, pauli_uniform)


def test_exhaustive_merges_identical_preparations():
    table = DataTable(d=2, m=1, s=2, entries=as_grid([["1/2", "1/2"], ["1/2", "1/2"]]))
    uniform = block_uniform(table, determinize(table, model1(table)))
    result = exhaustive_method1(table, uniform)
    assert result.omega == 2
    assert verify_of(table, result).valid


def test_method1_reproducible_and_valid(pauli, pauli_uniform):
    params = CompressionParams(seed=3, restarts=5, iterations=200)
    a = compress_method1(pauli, pauli_uniform, params)
    b = compress_method1(pauli, pauli_uniform, params)
    assert a == b
    assert rank(pauli) <= a.omega <= 12
    assert verify_of(pauli, a).valid
    if a.omega < 12:
        assert psi_classify(a).psi_epistemic


def test_method1_restart_zero_never_worse_than_input(pauli, pauli_uniform):
    result = method1_restart(pauli, pauli_uniform, CompressionParams(iterations=50), restart=0)
    assert result.omega <= dedupe(pauli, pauli_uniform.base).omega
    assert verify_of(pauli, result).valid


def test_method1_winner_is_lowest_omega_then_lowest_restart(pauli, pauli_uniform):
    first = pauli_optimal_factorization()
    second = pauli_optimal_factorization()
    candidates = [dedupe(pauli, pauli_uncompressed_factorization()), first, second]
    result = compress_method1(pauli, pauli_uniform, CompressionParams(restarts=3), runner=lambda *_: candidates)
    assert result is first


@pytest.mark.slow
def test_method1_kernaghan(kernaghan, kernaghan_deterministic):
    uniform = block_uniform(kernaghan, kernaghan_deterministic)
    result = compress_method1(kernaghan, uniform, CompressionParams(seed=0, restarts=100, iterations=10_000))
    assert result.omega <= 64
    assert result.omega >= rank(kernaghan)
    assert verify_of(kernaghan, result).valid
    assert psi_classify(result).psi_epistemic


def test_grid_moves_empty_a_cell(three_outcome):
    factorization = model2(three_outcome)
    first = grid_distribution(factorization, 0, 3, 2)
    second = grid_distribution(factorization, 1, 3, 2)
    marginals = [grid_marginal(first, axis) for axis in range(2)]

    assert grid_move(first, (1, 1), 0, 1, 2, 2) == F(1, 9)
    assert first.mass[(1, 1)] == 0
    assert first.mass[(2, 1)] == F(1, 3)
    assert first.mass[(1, 2)] == F(2, 9)
    assert first.mass[(2, 2)] == F(1, 9)
    assert [grid_marginal(first, axis) for axis in range(2)] == marginals
    assert first.total() == 1

    assert grid_move(second, (1, 1), 0, 1, 0, 0) == F(1, 6)
    assert second.mass[(1, 1)] == 0
    assert second.mass[(0, 1)] == F(1, 2)
    assert second.mass[(1, 0)] == F(1, 3)
    assert second.mass[(0, 0)] == F(1, 6)


def test_grid_move_needs_enough_opposite_mass(three_outcome):
    grid = grid_distribution(model2(three_outcome), 0, 3, 2)
    with pytest.raises(StructuralError, match="opposite"):
        grid_move(grid, (1, 1), 0, 1, 0, 0)
    with pytest.raises(StructuralError):
        grid_move(grid, (1, 1), 0, 0, 2, 2)


def test_grid_move_refuses_marginal_drift(three_outcome, monkeypatch):
    grid = grid_distribution(model2(three_outcome), 0, 3, 2)
    calls = iter(range(1000))
    monkeypatch.setattr(GridDistribution, "marginal", lambda self, axis: [F(next(calls))])
    with pytest.raises(StructuralError, match="changed a marginal"):
        grid_move(grid, (1, 1), 0, 1, 2, 2)


def test_grid_needs_tuple_index(pauli):
    with pytest.raises(StructuralError):
        grid_distribution(model1(pauli), 0, 2, 3)


def test_method2_example(three_outcome):
    factorization = model2(three_outcome)
    result = compress_method2(three_outcome, factorization)
    assert result.omega <= 7
    assert rank(three_outcome) <= result.omega
    assert verify_of(three_outcome, result).valid
    assert (0, 2) not in result.tuple_index
    assert set(result.tuple_index) <= set(factorization.tuple_index)


def test_method2_removes_zero_slices():
    table = DataTable(d=2, m=2, s=1, entries=as_grid([[1], [0], ["1/2"], ["1/2"]]))
    result = compress_method2(table, model2(table))
    assert result.tuple_index == ((0, 0), (0, 1))
    assert result.P == as_grid([["1/2"], ["1/2"]])


def test_method2_needs_model2(pauli):
    with pytest.raises(StructuralError):
        compress_method2(pauli, model1(pauli))
