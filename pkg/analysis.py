"""
Diagnostics of a factorization against its table: psi-ontology class, rows that share a
projector but not an indicator function, and ontic states that can never be prepared.
"""

from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from errors import StructuralError
from factorization import require_verified
from logging_config import get_logger
from models import (
    AnalysisReport,
    ColumnWitness,
    ContextReport,
    DataTable,
    DeficiencyEntry,
    DeficiencyReport,
    OntFactorization,
    PsiClass,
    RowPairDifference,
)
from table_core import rank

logger = get_logger("ontfactor.analysis")


def _supports(factorization: OntFactorization) -> List[frozenset]:
    s = len(factorization.P[0]) if factorization.P else 0
    return [frozenset(j for j, row in enumerate(factorization.P) if row[k] > 0) for k in range(s)]


def psi_classify(factorization: OntFactorization) -> PsiClass:
    supports = _supports(factorization)
    ontic = all(not (a & b) for a, b in combinations(supports, 2))
    return PsiClass(
        psi_ontic=ontic,
        psi_complete=all(len(support) == 1 for support in supports),
        psi_epistemic=not ontic,
    )


def duplicate_row_groups(table: DataTable) -> Tuple[Tuple[int, ...], ...]:
    """Rows naming the same projector: by row label when labels exist, else by equal entries."""
    groups: Dict[object, List[int]] = {}
    for r in range(table.n_rows):
        key = table.row_labels[r] if table.row_labels is not None else table.entries[r]
        groups.setdefault(key, []).append(r)
    return tuple(tuple(rows) for rows in groups.values() if len(rows) > 1)


def contextual_pairs(table: DataTable, factorization: OntFactorization) -> ContextReport:
    groups = duplicate_row_groups(table)
    M = factorization.M
    pairs = []
    for group in groups:
        for a, b in combinations(group, 2):
            differing = tuple(j for j in range(factorization.omega) if M[a][j] != M[b][j])
            pairs.append(RowPairDifference(row_a=a, row_b=b, differing_states=differing))
    return ContextReport(duplicate_groups=groups, pairs=tuple(pairs))


def unfaithful_states(table: DataTable, factorization: OntFactorization) -> DeficiencyReport:
    """For every certain outcome (entry 1): states that give that outcome with certainty
    (or positive probability, if indeterministic) but lie outside the preparation's support."""
    supports = _supports(factorization)
    deterministic = factorization.deterministic
    entries = []
    for r, row in enumerate(table.entries):
        if deterministic:
            support_m = tuple(j for j, v in enumerate(factorization.M[r]) if v == 1)
        else:
            support_m = tuple(j for j, v in enumerate(factorization.M[r]) if v > 0)
        for k, value in enumerate(row):
            if value != 1:
                continue
            support_p = tuple(sorted(supports[k]))
            entries.append(DeficiencyEntry(
                row=r,
                preparation=k,
                support_p=support_p,
                support_m=support_m,
                unfaithful=tuple(j for j in support_m if j not in supports[k]),
            ))
    return DeficiencyReport(entries=tuple(entries), advisory=not deterministic)


def ks_column_witness(
    factorization: OntFactorization,
    row_groups: Sequence[Sequence[int]],
) -> List[Optional[ColumnWitness]]:
    """Per ontic state, the first duplicate row pair on which its indicator values differ."""
    if not factorization.deterministic:
        raise StructuralError("column witnesses need a deterministic factorization")
    M = factorization.M
    for group in row_groups:
        if any(r < 0 or r >= len(M) for r in group):
            raise StructuralError(f"row group {tuple(group)} falls outside M's {len(M)} rows")

    witnesses: List[Optional[ColumnWitness]] = []
    for j in range(factorization.omega):
        found = None
        for group in row_groups:
            for a, b in combinations(group, 2):
                if M[a][j] != M[b][j]:
                    found = ColumnWitness(state=j, row_a=a, row_b=b, value_a=M[a][j], value_b=M[b][j])
                    break
            if found is not None:
                break
        witnesses.append(found)
    return witnesses


def analyze(table: DataTable, factorization: OntFactorization) -> AnalysisReport:
    require_verified(table, factorization)
    table_rank = rank(table)
    witnesses = None
    if factorization.deterministic:
        witnesses = tuple(ks_column_witness(factorization, duplicate_row_groups(table)))
    report = AnalysisReport(
        psi=psi_classify(factorization),
        contexts=contextual_pairs(table, factorization),
        deficiency=unfaithful_states(table, factorization),
        witnesses=witnesses,
        rank=table_rank,
        omega=factorization.omega,
        rank_bound_holds=table_rank <= factorization.omega,
    )
    logger.info(
        "analysis: omega=%d rank=%d psi_ontic=%s witnesses=%s",
        factorization.omega, table_rank, report.psi.psi_ontic,
        None if witnesses is None else sum(w is not None for w in witnesses),
    )
    return report
