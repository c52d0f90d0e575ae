"""
Ontological factorizations D = M P.

Constructors for the three models, replica determinization of rational factorizations,
exact verification and the bounds that bracket the minimal number of ontic states.
"""

import math
import random
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from config import config
from errors import ResourceError, StructuralError
from logging_config import get_logger
from models import (
    BoundsReport,
    DataTable,
    DeterminizeMode,
    DeterminizePolicy,
    OntFactorization,
    ValidationReport,
    Violation,
    ViolationKind,
    as_grid,
)
from table_core import matmul, pattern_lower_bound, rank, require_valid

logger = get_logger("ontfactor.factorization")

ZERO = Fraction(0)
ONE = Fraction(1)

MERGE_SCOPES = ("preparation", "table")

POINTER_NOTES = (
    "approximate factorizations from short classical advice strings are not computed",
    "families containing every stabilizer state and measurement force exponentially many ontic states",
    "cp-rank and nonnegative matrix factorization bounds are not computed",
    "the minimal quantum dimension realizing a table is not computed",
)


def indicator_columns(patterns: Sequence[Tuple[int, ...]], d: int, m: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """M rows for deterministic states given as per-measurement outcome tuples."""
    return tuple(
        tuple(ONE if pattern[x] == i else ZERO for pattern in patterns)
        for x in range(m)
        for i in range(d)
    )


def outcome_tuple(factorization: OntFactorization, j: int, d: int, m: int) -> Tuple[int, ...]:
    """Outcome index per measurement of deterministic ontic state j."""
    column = factorization.m_column(j)
    out = []
    for x in range(m):
        ones = [i for i in range(d) if column[x * d + i] == 1]
        if len(ones) != 1:
            raise StructuralError(f"ontic state {j} is not deterministic on measurement {x}")
        out.append(ones[0])
    return tuple(out)


# --------------------------------------------------------------------------- verification


def _check_shapes(table: DataTable, factorization: OntFactorization) -> None:
    n_rows, omega = table.n_rows, factorization.omega
    if len(factorization.M) != n_rows:
        raise StructuralError(f"M has {len(factorization.M)} rows, table has {n_rows}")
    for r, row in enumerate(factorization.M):
        if len(row) != omega:
            raise StructuralError(f"M row {r} has {len(row)} columns, omega is {omega}")
    if len(factorization.P) != omega:
        raise StructuralError(f"P has {len(factorization.P)} rows, omega is {omega}")
    for j, row in enumerate(factorization.P):
        if len(row) != table.s:
            raise StructuralError(f"P row {j} has {len(row)} columns, table has {table.s}")


def verify_of(table: DataTable, factorization: OntFactorization) -> ValidationReport:
    _check_shapes(table, factorization)
    d, m, s, omega = table.d, table.m, table.s, factorization.omega
    M, P = factorization.M, factorization.P
    violations: List[Violation] = []

    for r, row in enumerate(M):
        for j, v in enumerate(row):
            if v < 0 or v > 1:
                violations.append(Violation(kind=ViolationKind.M_RANGE, block=r // d, row=r % d, column=j))
    for x in range(m):
        for j in range(omega):
            if sum((M[x * d + i][j] for i in range(d)), ZERO) != 1:
                violations.append(Violation(kind=ViolationKind.M_COLUMN_SUM, block=x, column=j))

    for j, row in enumerate(P):
        for k, v in enumerate(row):
            if v < 0 or v > 1:
                violations.append(Violation(kind=ViolationKind.P_RANGE, row=j, column=k))
    for k in range(s):
        if sum((P[j][k] for j in range(omega)), ZERO) != 1:
            violations.append(Violation(kind=ViolationKind.P_COLUMN_SUM, column=k))

    if factorization.deterministic != all(v == 0 or v == 1 for row in M for v in row):
        violations.append(Violation(kind=ViolationKind.DETERMINISTIC_FLAG))

    product_grid = matmul(M, P, s)
    for r, (got, want) in enumerate(zip(product_grid, table.entries)):
        for k, (a, b) in enumerate(zip(got, want)):
            if a != b:
                violations.append(Violation(kind=ViolationKind.PRODUCT_MISMATCH, block=r // d, row=r % d, column=k))

    return ValidationReport.from_violations(violations)


def require_verified(table: DataTable, factorization: OntFactorization) -> None:
    report = verify_of(table, factorization)
    if not report.valid:
        first = report.violations[0]
        raise StructuralError(
            f"factorization does not reproduce the table: {len(report.violations)} violation(s), "
            f"first {first.kind.value} at block={first.block} row={first.row} column={first.column}"
        )


# --------------------------------------------------------------------------- models


def model1(table: DataTable) -> OntFactorization:
    """One ontic state per preparation: M = D, P = identity."""
    require_valid(table)
    s = table.s
    identity = [[ONE if j == k else ZERO for k in range(s)] for j in range(s)]
    return OntFactorization.build(table.entries, identity)


def model2(table: DataTable, cap: Optional[int] = None) -> OntFactorization:
    """Product model over all d^m outcome tuples, j_1 varying slowest."""
    require_valid(table)
    cap = config.MODEL2_STATE_CAP if cap is None else cap
    d, m, s = table.d, table.m, table.s
    if m * math.log2(d) > math.log2(cap) + 1e-9 or d ** m > cap:
        raise ResourceError(f"model 2 needs d^m = {d}^{m} ontic states; cap is {cap} (config.MODEL2_STATE_CAP)")

    tuples = list(product(range(d), repeat=m))
    P = []
    for t in tuples:
        row = []
        for k in range(s):
            weight = ONE
            for x, i in enumerate(t):
                weight *= table.value(x, i, k)
                if not weight:
                    break
            row.append(weight)
        P.append(row)
    logger.debug("model 2: %d ontic states for d=%d m=%d", len(tuples), d, m)
    return OntFactorization.build(indicator_columns(tuples, d, m), P, tuple_index=tuples)


def _decompose_column(table: DataTable, k: int) -> List[Tuple[Tuple[int, ...], Fraction]]:
    """Greedy split of preparation k into deterministic vectors.

    Each pass takes the smallest positive residual v (first in row order), keeps its outcome
    for the owning measurement and the largest residual (lowest index on ties) for every other
    measurement, and subtracts v from all selected entries.
    """
    d, m = table.d, table.m
    residual = list(table.column(k))
    emitted = []
    while True:
        positive = [(v, r) for r, v in enumerate(residual) if v > 0]
        if not positive:
            break
        v, owner = min(positive)
        x0, i0 = divmod(owner, d)
        pattern = []
        for x in range(m):
            if x == x0:
                pattern.append(i0)
            else:
                block = residual[x * d:(x + 1) * d]
                pattern.append(max(range(d), key=lambda i: (block[i], -i)))
        for x, i in enumerate(pattern):
            residual[x * d + i] -= v
        emitted.append((tuple(pattern), v))
    return emitted


def model3(table: DataTable, merge: str = "preparation") -> OntFactorization:
    """Deterministic decomposition of each preparation column.

    merge="preparation" merges repeated vectors emitted for the same preparation only, so every
    ontic state belongs to one preparation. merge="table" merges identical M columns across
    the whole table, accumulating weights per preparation.
    """
    if merge not in MERGE_SCOPES:
        raise ValueError(f"merge must be one of {MERGE_SCOPES}, got {merge!r}")
    require_valid(table)
    d, m, s = table.d, table.m, table.s

    keys: List[Tuple] = []
    weights: Dict[Tuple, Dict[int, Fraction]] = {}
    for k in range(s):
        for pattern, v in _decompose_column(table, k):
            key = pattern if merge == "table" else (k, pattern)
            if key not in weights:
                keys.append(key)
                weights[key] = {}
            weights[key][k] = weights[key].get(k, ZERO) + v

    patterns = [key if merge == "table" else key[1] for key in keys]
    P = [[weights[key].get(k, ZERO) for k in range(s)] for key in keys]
    logger.debug("model 3 (%s merge): omega=%d for s=%d", merge, len(keys), s)
    return OntFactorization.build(indicator_columns(patterns, d, m), P)


# --------------------------------------------------------------------------- determinization


def _replica_outcomes(counts: Sequence[int], policy: DeterminizePolicy, j: int, x: int) -> List[int]:
    """Outcome of each replica for one measurement: outcome i appears counts[i] times."""
    outcomes = [i for i, c in enumerate(counts) for _ in range(c)]
    if policy.mode == DeterminizeMode.SEEDED_RANDOM:
        random.Random(f"{policy.seed}:{j}:{x}").shuffle(outcomes)
    return outcomes


def determinize(
    table: DataTable,
    factorization: OntFactorization,
    policy: Optional[DeterminizePolicy] = None,
) -> OntFactorization:
    """Split state j into L_j equal-weight replicas, L_j the LCM of M column j's denominators,
    so that outcome i of measurement x is carried by exactly L_j * M[x][i][j] replicas."""
    policy = policy or DeterminizePolicy()
    require_verified(table, factorization)
    d, m = table.d, table.m

    replicas = [math.lcm(*(v.denominator for v in factorization.m_column(j))) for j in range(factorization.omega)]
    if all(L == 1 for L in replicas):
        return factorization

    patterns: List[Tuple[int, ...]] = []
    P: List[Tuple[Fraction, ...]] = []
    for j, L in enumerate(replicas):
        column = factorization.m_column(j)
        per_measurement = [
            _replica_outcomes([int(column[x * d + i] * L) for i in range(d)], policy, j, x)
            for x in range(m)
        ]
        weight_row = tuple(v / L for v in factorization.P[j])
        for r in range(L):
            patterns.append(tuple(per_measurement[x][r] for x in range(m)))
            P.append(weight_row)

    logger.info(
        "determinized omega %d -> %d (%s)", factorization.omega, len(patterns), policy.mode.value
    )
    return OntFactorization.build(indicator_columns(patterns, d, m), P)


# --------------------------------------------------------------------------- bounds


def bounds_report(table: DataTable) -> BoundsReport:
    require_valid(table)
    d, m, s = table.d, table.m, table.s
    rank_lb = rank(table)
    pattern_lb = pattern_lower_bound(table)

    saturation = config.BOUND_SATURATION
    saturated = m * math.log2(d) > math.log2(saturation) + 1 or d ** m > saturation
    upper_model2 = saturation if saturated else d ** m
    if saturated:
        logger.warning("d^m = %d^%d saturates at %d", d, m, saturation)

    worst_case = min(upper_model2, s)
    return BoundsReport(
        rank_lb=rank_lb,
        pattern_lb=pattern_lb,
        lower=max(rank_lb, pattern_lb),
        upper_indet=s,
        upper_det_model2=upper_model2,
        upper_det_model2_saturated=saturated,
        upper_det_model3=model3(table, merge="table").omega,
        worst_case_bound=worst_case,
        worst_case_note=(
            f"adversarial tables of this shape can need min(d^m, s) = {worst_case} ontic states "
            "(every outcome string as a deterministic preparation)"
        ),
        caratheodory_note=d * m + 1,
        notes=POINTER_NOTES,
    )


# --------------------------------------------------------------------------- reference factorizations


def pauli_optimal_factorization() -> OntFactorization:
    """Four-state deterministic model of the Pauli table (a single toy bit)."""
    half = Fraction(1, 2)
    M = [
        [1, 1, 0, 0],
        [0, 0, 1, 1],
        [1, 0, 1, 0],
        [0, 1, 0, 1],
        [1, 0, 0, 1],
        [0, 1, 1, 0],
    ]
    P = [
        [1, 0, 1, 0, 1, 0],
        [1, 0, 0, 1, 0, 1],
        [0, 1, 1, 0, 0, 1],
        [0, 1, 0, 1, 1, 0],
    ]
    return OntFactorization.build(M, [[half * v for v in row] for row in P])


def pauli_uncompressed_factorization() -> OntFactorization:
    """Twelve-state deterministic model of the Pauli table: two states of weight 1/2 per preparation."""
    half = Fraction(1, 2)
    M = [
        [1, 1, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0],
        [0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 1],
        [1, 0, 1, 0, 1, 1, 0, 0, 1, 0, 0, 1],
        [0, 1, 0, 1, 0, 0, 1, 1, 0, 1, 1, 0],
        [0, 1, 0, 1, 0, 1, 1, 0, 1, 1, 0, 0],
        [1, 0, 1, 0, 1, 0, 0, 1, 0, 0, 1, 1],
    ]
    P = [[half if j // 2 == k else ZERO for k in range(6)] for j in range(12)]
    return OntFactorization.build(as_grid(M), P)
