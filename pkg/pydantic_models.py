from enum import Enum
from typing import Literal, Optional

from pydantic import BaseModel, Field

from models import (
    CompressionParams,
    DataTable,
    DeterminizePolicy,
    OntFactorization,
    QuantumRealization,
)


class TableName(str, Enum):
    PAULI = "pauli"
    KERNAGHAN = "kernaghan"
    QUTRIT = "qutrit"
    BINARY_WORST = "binary-worst"


class FactorRequest(BaseModel):
    table: DataTable
    model: Literal[1, 2, 3]
    determinize: bool = False
    policy: DeterminizePolicy = DeterminizePolicy()
    merge: Literal["preparation", "table"] = "preparation"


class FactorizationPair(BaseModel):
    table: DataTable
    factorization: OntFactorization


class CompressRequest(FactorizationPair):
    method: Literal[1, 2]
    exhaustive: bool = False
    params: CompressionParams = Field(default_factory=CompressionParams)


class CompressResponse(BaseModel):
    omega_before: int
    omega_after: int
    factorization: OntFactorization


class RealizeResponse(BaseModel):
    realization: QuantumRealization
    max_error: float
    within_tolerance: bool


class ErrorResponse(BaseModel):
    error: str
    detail: str
    location: Optional[str] = None
