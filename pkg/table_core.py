"""
Data tables: structural checks, validation, exact rank, combinatorial lower bounds,
builders for the worked example tables and JSON (de)serialization.
"""

import random
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from pydantic import ValidationError

from config import config
from errors import InvalidTableError, ResourceError, StructuralError, TableParseError
from logging_config import get_logger
from models import DataTable, ValidationReport, Violation, ViolationKind

logger = get_logger("ontfactor.table")

ZERO = Fraction(0)
ONE = Fraction(1)


# --------------------------------------------------------------------------- structure


def _structure_problem(table: DataTable) -> Optional[Tuple[str, str]]:
    """First (location, message) at which the grid disagrees with (d, m, s), or None."""
    n_rows = table.d * table.m
    if len(table.entries) != n_rows:
        return "entries", f"expected {n_rows} rows (d*m), got {len(table.entries)}"
    for r, row in enumerate(table.entries):
        if len(row) != table.s:
            return f"entries[{r}]", f"expected {table.s} columns, got {len(row)}"
    if table.row_labels is not None and len(table.row_labels) != n_rows:
        return "row_labels", f"expected {n_rows} labels, got {len(table.row_labels)}"
    if table.prep_labels is not None and len(table.prep_labels) != table.s:
        return "prep_labels", f"expected {table.s} labels, got {len(table.prep_labels)}"
    return None


def check_structure(table: DataTable) -> None:
    problem = _structure_problem(table)
    if problem is not None:
        location, message = problem
        raise StructuralError(f"{location}: {message}")


def validate_table(table: DataTable) -> ValidationReport:
    """Range, block column sums and label/row consistency; exact, no tolerance."""
    check_structure(table)
    d, m, s = table.d, table.m, table.s
    violations: List[Violation] = []

    for r, row in enumerate(table.entries):
        for k, v in enumerate(row):
            if v < 0 or v > 1:
                violations.append(Violation(kind=ViolationKind.RANGE, block=r // d, row=r % d, column=k))

    for x in range(m):
        block = table.block(x)
        for k in range(s):
            if sum((row[k] for row in block), ZERO) != 1:
                violations.append(Violation(kind=ViolationKind.COLUMN_SUM, block=x, column=k))

    if table.row_labels is not None:
        first_row_for_label = {}
        for r, label in enumerate(table.row_labels):
            if label not in first_row_for_label:
                first_row_for_label[label] = r
                continue
            reference = table.entries[first_row_for_label[label]]
            for k, (a, b) in enumerate(zip(reference, table.entries[r])):
                if a != b:
                    violations.append(
                        Violation(kind=ViolationKind.LABEL_ROW_MISMATCH, block=r // d, row=r % d, column=k)
                    )
                    break

    return ValidationReport.from_violations(violations)


def require_valid(table: DataTable) -> None:
    report = validate_table(table)
    if not report.valid:
        first = report.violations[0]
        raise InvalidTableError(
            f"table is not valid: {len(report.violations)} violation(s), first {first.kind.value} "
            f"at block={first.block} row={first.row} column={first.column}",
            report=report,
        )


# --------------------------------------------------------------------------- exact linear algebra


def matrix_rank(rows: Sequence[Sequence]) -> int:
    """Rank over Q by fraction Gaussian elimination, pivoting on the largest magnitude
    (ties to the lowest row index) so the elimination order is reproducible."""
    a = [[Fraction(v) for v in row] for row in rows]
    if not a or not a[0]:
        return 0
    n_rows, n_cols = len(a), len(a[0])
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = max(range(rank, n_rows), key=lambda r: (abs(a[r][col]), -r))
        if a[pivot][col] == 0:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        pivot_row = a[rank]
        for r in range(rank + 1, n_rows):
            f = a[r][col]
            if f:
                factor = f / pivot_row[col]
                a[r] = a[r][:col] + [x - factor * y for x, y in zip(a[r][col:], pivot_row[col:])]
        rank += 1
    return rank


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]], n_cols: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """Exact product; n_cols is passed so an empty inner dimension still yields the right shape."""
    columns = list(zip(*b)) if b else [()] * n_cols
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col) if x and y), ZERO) for col in columns)
        for row in a
    )


def rank(table: DataTable) -> int:
    check_structure(table)
    result = matrix_rank(table.entries)
    logger.debug("rank d=%d m=%d s=%d -> %d", table.d, table.m, table.s, result)
    return result


# --------------------------------------------------------------------------- combinatorial bounds


def deterministic_pattern(table: DataTable, k: int) -> Optional[Tuple[int, ...]]:
    """Outcome index per measurement if column k is all 0/1, else None."""
    column = table.column(k)
    if any(v != 0 and v != 1 for v in column):
        return None
    d = table.d
    return tuple(
        next(i for i in range(d) if column[x * d + i] == 1)
        for x in range(table.m)
    )


def pattern_lower_bound(table: DataTable) -> int:
    check_structure(table)
    if table.s == 0:
        return 0
    patterns = {deterministic_pattern(table, k) for k in range(table.s)}
    patterns.discard(None)
    # any nonempty table needs at least one ontic state
    return max(len(patterns), 1)


# --------------------------------------------------------------------------- builders


def binary_worst_case_table(m: int, max_m: Optional[int] = None) -> DataTable:
    """d=2, s=2^m: first-outcome rows enumerate every m-bit string, measurement 1 the most significant bit."""
    if m < 1:
        raise StructuralError(f"m must be at least 1, got {m}")
    max_m = config.BINARY_WORST_CASE_MAX_M if max_m is None else max_m
    if m > max_m:
        raise ResourceError(
            f"binary worst-case table with m={m} has 2^{m} columns; cap is m<={max_m} "
            "(config.BINARY_WORST_CASE_MAX_M)"
        )
    s = 2 ** m
    rows = []
    for x in range(m):
        shift = m - 1 - x
        first = tuple(Fraction((c >> shift) & 1) for c in range(s))
        rows.append(first)
        rows.append(tuple(ONE - v for v in first))
    prep_labels = tuple(format(c, f"0{m}b") for c in range(s))
    return DataTable(d=2, m=m, s=s, entries=tuple(rows), prep_labels=prep_labels)


def random_table(d: int, m: int, s: int, seed: int, denominator_bound: int = 12) -> DataTable:
    """Seeded random valid table: each block column is a uniform composition of a random
    denominator q <= denominator_bound into d nonnegative parts, divided by q."""
    if d < 2 or m < 1 or s < 1:
        raise StructuralError(f"random table needs d >= 2, m >= 1 and s >= 1, got d={d} m={m} s={s}")
    if denominator_bound < 1:
        raise StructuralError("denominator_bound must be at least 1")
    rng = random.Random(seed)
    columns = []
    for _ in range(s):
        column = []
        for _ in range(m):
            q = rng.randint(1, denominator_bound)
            cuts = sorted(rng.sample(range(q + d - 1), d - 1))
            bounds = [-1] + cuts + [q + d - 1]
            column.extend(Fraction(bounds[i + 1] - bounds[i] - 1, q) for i in range(d))
        columns.append(column)
    entries = tuple(tuple(columns[k][r] for k in range(s)) for r in range(d * m))
    return DataTable(d=d, m=m, s=s, entries=entries)


def _table(d: int, m: int, rows: Sequence[Sequence], **labels) -> DataTable:
    entries = tuple(tuple(Fraction(v) for v in row) for row in rows)
    return DataTable(d=d, m=m, s=len(entries[0]), entries=entries, **labels)


def three_outcome_example_table() -> DataTable:
    """d=3, m=2, s=2 worked example used by Models 2 and 3 and grid compression."""
    return _table(3, 2, [
        ["0", "2/3"],
        ["1/3", "1/3"],
        ["2/3", "0"],
        ["1/3", "1/2"],
        ["1/3", "1/2"],
        ["1/3", "0"],
    ])


def two_preparation_example_table() -> DataTable:
    """d=2, m=2, s=2 table whose columns are multiples of 1/4 and 1/3 (determinization example)."""
    return _table(2, 2, [
        ["1/2", "2/3"],
        ["1/2", "1/3"],
        ["3/4", "1"],
        ["1/4", "0"],
    ])


# --------------------------------------------------------------------------- serialization


def _format_location(loc) -> str:
    out = ""
    for part in loc:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += f".{part}" if out else str(part)
    return out


def parse_table(data: Union[bytes, str]) -> DataTable:
    try:
        table = DataTable.model_validate_json(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        raise TableParseError(error["msg"], _format_location(error["loc"]) or None) from exc
    problem = _structure_problem(table)
    if problem is not None:
        location, message = problem
        raise TableParseError(message, location)
    return table


def serialize_table(table: DataTable) -> bytes:
    check_structure(table)
    return table.model_dump_json(exclude_none=True).encode("utf-8")
