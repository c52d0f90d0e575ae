"""
Domain types for ontfactor.

Every probability is an exact ``fractions.Fraction``; on the JSON wire it travels as a
``"num/den"`` string in lowest terms (integers as ``"0"``/``"1"``). All models are frozen
value types except GridDistribution, which compression mutates move by move.
"""

import re
from enum import Enum
from fractions import Fraction
from typing import Annotated, Dict, List, Optional, Sequence, Tuple

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    WithJsonSchema,
    model_validator,
)

from config import config

_RATIONAL_TOKEN = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value) -> Fraction:
    """Coerce a wire token to a Fraction. Floats, NaN and booleans are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("boolean is not a rational token")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        match = _RATIONAL_TOKEN.match(value)
        if not match:
            raise ValueError(f"not a rational token: {value!r}")
        denominator = int(match.group(2)) if match.group(2) is not None else 1
        if denominator == 0:
            raise ValueError(f"zero denominator: {value!r}")
        return Fraction(int(match.group(1)), denominator)
    raise ValueError(f"float and non-string tokens are not accepted: {value!r}")


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


Rational = Annotated[
    Fraction,
    BeforeValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str, when_used="json"),
    WithJsonSchema({"type": "string", "pattern": r"^-?\d+(/\d+)?$"}),
]

RationalGrid = Tuple[Tuple[Rational, ...], ...]
ComplexPair = Tuple[float, float]
StateVector = Tuple[ComplexPair, ...]

_FROZEN = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def as_grid(rows: Sequence[Sequence]) -> Tuple[Tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


# --------------------------------------------------------------------------- tables


class DataTable(BaseModel):
    """dm x s grid, rows grouped in m consecutive blocks of d outcomes."""

    model_config = _FROZEN

    d: int = Field(ge=2)
    m: int = Field(ge=1)
    s: int = Field(ge=0)
    entries: RationalGrid
    row_labels: Optional[Tuple[str, ...]] = None
    prep_labels: Optional[Tuple[str, ...]] = None

    @property
    def n_rows(self) -> int:
        return self.d * self.m

    def row_index(self, x: int, i: int) -> int:
        return x * self.d + i

    def value(self, x: int, i: int, k: int) -> Fraction:
        return self.entries[x * self.d + i][k]

    def block(self, x: int) -> Tuple[Tuple[Fraction, ...], ...]:
        return self.entries[x * self.d:(x + 1) * self.d]

    def column(self, k: int) -> Tuple[Fraction, ...]:
        return tuple(row[k] for row in self.entries)


class ViolationKind(str, Enum):
    RANGE = "range"
    COLUMN_SUM = "column-sum"
    LABEL_ROW_MISMATCH = "label-row-mismatch"
    M_RANGE = "m-range"
    M_COLUMN_SUM = "m-column-sum"
    P_RANGE = "p-range"
    P_COLUMN_SUM = "p-column-sum"
    PRODUCT_MISMATCH = "product-mismatch"
    DETERMINISTIC_FLAG = "deterministic-flag"


class Violation(BaseModel):
    """One failed check. block/row are (measurement, outcome) for table and M rows;
    for P checks block is None and row is the ontic state."""

    model_config = _FROZEN

    kind: ViolationKind
    block: Optional[int] = None
    row: Optional[int] = None
    column: Optional[int] = None


class ValidationReport(BaseModel):
    model_config = _FROZEN

    valid: bool
    violations: Tuple[Violation, ...] = ()

    @model_validator(mode="after")
    def _valid_iff_empty(self):
        if self.valid != (not self.violations):
            raise ValueError("valid must be true exactly when violations is empty")
        return self

    @classmethod
    def from_violations(cls, violations: Sequence[Violation]) -> "ValidationReport":
        violations = tuple(violations)
        return cls(valid=not violations, violations=violations)


# --------------------------------------------------------------------------- factorizations


class OntFactorization(BaseModel):
    """D = M P with M of shape dm x omega and P of shape omega x s."""

    model_config = _FROZEN

    omega: int = Field(ge=0)
    M: RationalGrid
    P: RationalGrid
    deterministic: bool
    # Model-2 ontic states carry their m-tuple (j_1, ..., j_m)
    tuple_index: Optional[Tuple[Tuple[int, ...], ...]] = None

    @classmethod
    def build(cls, M, P, tuple_index=None) -> "OntFactorization":
        M = as_grid(M)
        P = as_grid(P)
        deterministic = all(v == 0 or v == 1 for row in M for v in row)
        return cls(
            omega=len(P),
            M=M,
            P=P,
            deterministic=deterministic,
            tuple_index=tuple(tuple(t) for t in tuple_index) if tuple_index is not None else None,
        )

    def m_column(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(row[j] for row in self.M)


class DeterminizeMode(str, Enum):
    CONTIGUOUS = "contiguous"
    SEEDED_RANDOM = "seeded-random"


class DeterminizePolicy(BaseModel):
    model_config = _FROZEN

    mode: DeterminizeMode = DeterminizeMode.CONTIGUOUS
    seed: int = 0


class BoundsReport(BaseModel):
    model_config = _FROZEN

    rank_lb: int
    pattern_lb: int
    lower: int
    upper_indet: int
    upper_det_model2: int
    upper_det_model2_saturated: bool = False
    upper_det_model3: int
    worst_case_bound: int
    worst_case_note: str
    caratheodory_note: int
    notes: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _lower_below_uppers(self):
        if self.lower > self.upper_indet or self.lower > self.upper_det_model2:
            raise ValueError("lower bound exceeds an upper bound")
        return self


# --------------------------------------------------------------------------- quantum


class QuantumRealization(BaseModel):
    """States and PVMs as [re, im] pairs; pvms[x][i] lists the spanning vectors of element i."""

    model_config = _FROZEN

    dim: int = Field(ge=1)
    states: Tuple[StateVector, ...]
    pvms: Tuple[Tuple[Tuple[StateVector, ...], ...], ...]


class KSInstance(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    n_projectors: int = Field(alias="n", ge=0)
    contexts: Tuple[Tuple[int, ...], ...]

    @model_validator(mode="after")
    def _indices_in_range(self):
        for c, context in enumerate(self.contexts):
            if not context:
                raise ValueError(f"context {c} is empty")
            if len(set(context)) != len(context):
                raise ValueError(f"context {c} repeats a projector")
            if any(p < 0 or p >= self.n_projectors for p in context):
                raise ValueError(f"context {c} names a projector outside 0..{self.n_projectors - 1}")
        return self


# --------------------------------------------------------------------------- compression


class BlockUniformOF(BaseModel):
    """Deterministic OF whose states are partitioned into one uniform-weight block per preparation."""

    model_config = _FROZEN

    base: OntFactorization
    blocks: Tuple[Tuple[int, ...], ...]


class CompressionParams(BaseModel):
    model_config = _FROZEN

    seed: int = 0
    restarts: int = Field(default=1, ge=1)
    iterations: int = Field(default=1000, ge=1)
    exhaustive_cap: int = Field(default_factory=lambda: config.EXHAUSTIVE_CAP, ge=1)


class GridDistribution(BaseModel):
    """Mass of one preparation over the d^m tuple-indexed cells of a Model-2 factorization."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    d: int
    m: int
    preparation: int
    mass: Dict[Tuple[int, ...], Rational]

    def total(self) -> Fraction:
        return sum(self.mass.values(), Fraction(0))

    def marginal(self, axis: int) -> List[Fraction]:
        out = [Fraction(0)] * self.d
        for cell, v in self.mass.items():
            out[cell[axis]] += v
        return out


# --------------------------------------------------------------------------- analysis


class PsiClass(BaseModel):
    model_config = _FROZEN

    psi_ontic: bool
    psi_complete: bool
    psi_epistemic: bool


class RowPairDifference(BaseModel):
    model_config = _FROZEN

    row_a: int
    row_b: int
    differing_states: Tuple[int, ...]


class ContextReport(BaseModel):
    model_config = _FROZEN

    duplicate_groups: Tuple[Tuple[int, ...], ...]
    pairs: Tuple[RowPairDifference, ...]


class DeficiencyEntry(BaseModel):
    model_config = _FROZEN

    row: int
    preparation: int
    support_p: Tuple[int, ...]
    support_m: Tuple[int, ...]
    unfaithful: Tuple[int, ...]


class DeficiencyReport(BaseModel):
    model_config = _FROZEN

    entries: Tuple[DeficiencyEntry, ...]
    # indeterministic factorizations: support_m is strict positivity, report is advisory
    advisory: bool


class ColumnWitness(BaseModel):
    model_config = _FROZEN

    state: int
    row_a: int
    row_b: int
    value_a: Rational
    value_b: Rational


class AnalysisReport(BaseModel):
    model_config = _FROZEN

    psi: PsiClass
    contexts: ContextReport
    deficiency: DeficiencyReport
    # one entry per ontic state; present only for deterministic factorizations
    witnesses: Optional[Tuple[Optional[ColumnWitness], ...]] = None
    rank: int
    omega: int
    rank_bound_holds: bool
