from typing import Optional, Tuple

from analysis import analyze
from compression import block_uniform, compress_method1, compress_method2, exhaustive_method1
from errors import StructuralError
from factorization import bounds_report, determinize, model1, model2, model3, verify_of
from logging_config import get_logger
from models import (
    AnalysisReport,
    BoundsReport,
    CompressionParams,
    DataTable,
    DeterminizePolicy,
    KSInstance,
    OntFactorization,
    QuantumRealization,
    ValidationReport,
)
from orchestrator import get_restart_runner
from quantum_gen import (
    kernaghan_instance,
    kernaghan_table,
    ks_noncontextual_search,
    ks_parity_obstruction,
    pauli_qubit_table,
    qutrit_counterexample_table,
    realize,
    verify_realization,
)
from table_core import binary_worst_case_table, random_table, require_valid

TABLE_NAMES = ("pauli", "kernaghan", "qutrit", "binary-worst", "random")


class OntologyService:
    """Pipelines shared by the command line and the HTTP API: generate, factor, compress,
    verify, bound, analyze and realize."""

    def __init__(self, compression_backend: Optional[str] = None):
        self.restart_runner = get_restart_runner(compression_backend)
        self.logger = get_logger("ontfactor.service")

    def generate(
        self,
        name: str,
        d: Optional[int] = None,
        m: Optional[int] = None,
        s: Optional[int] = None,
        seed: int = 0,
        denominator_bound: int = 12,
    ) -> DataTable:
        if name == "pauli":
            return pauli_qubit_table()
        if name == "kernaghan":
            return kernaghan_table()
        if name == "qutrit":
            return qutrit_counterexample_table()
        if name == "binary-worst":
            if m is None:
                raise StructuralError("binary-worst needs m")
            return binary_worst_case_table(m)
        if name == "random":
            if d is None or m is None or s is None:
                raise StructuralError("random needs d, m and s")
            return random_table(d, m, s, seed, denominator_bound)
        raise StructuralError(f"unknown table {name!r}; expected one of {TABLE_NAMES}")

    def factor(
        self,
        table: DataTable,
        model: int,
        determinize_result: bool = False,
        policy: Optional[DeterminizePolicy] = None,
        merge: str = "preparation",
    ) -> OntFactorization:
        if model == 1:
            factorization = model1(table)
        elif model == 2:
            factorization = model2(table)
        elif model == 3:
            factorization = model3(table, merge=merge)
        else:
            raise StructuralError(f"model must be 1, 2 or 3, got {model}")
        if determinize_result:
            factorization = determinize(table, factorization, policy)
        self.logger.info("model %d: omega=%d deterministic=%s", model, factorization.omega, factorization.deterministic)
        return factorization

    def compress(
        self,
        table: DataTable,
        factorization: OntFactorization,
        method: int,
        params: Optional[CompressionParams] = None,
        exhaustive: bool = False,
    ) -> OntFactorization:
        params = params or CompressionParams()
        if method == 1:
            uniform = block_uniform(table, factorization)
            if exhaustive:
                return exhaustive_method1(table, uniform, params)
            return compress_method1(table, uniform, params, runner=self.restart_runner)
        if method == 2:
            return compress_method2(table, factorization, params)
        raise StructuralError(f"method must be 1 or 2, got {method}")

    def verify(self, table: DataTable, factorization: OntFactorization) -> ValidationReport:
        return verify_of(table, factorization)

    def bounds(self, table: DataTable) -> BoundsReport:
        return bounds_report(table)

    def analyze(self, table: DataTable, factorization: OntFactorization) -> AnalysisReport:
        return analyze(table, factorization)

    def realize(self, table: DataTable) -> Tuple[QuantumRealization, float]:
        require_valid(table)
        realization = realize(table)
        return realization, verify_realization(table, realization)

    def ks_check(self, instance: Optional[KSInstance] = None) -> dict:
        instance = instance or kernaghan_instance()
        assignment = ks_noncontextual_search(instance)
        return {
            "n": instance.n_projectors,
            "contexts": len(instance.contexts),
            "parity_obstruction": ks_parity_obstruction(instance),
            "satisfiable": assignment is not None,
            "assignment": assignment,
        }
