"""
Quantum generation of data tables.

Born-rule tables from pure states and projective measurements, the exact Pauli and
Kernaghan tables, a generic realization of any valid table on s*d dimensions, and a
brute-force Kochen-Specker assignment search.
"""

import math
from collections import Counter
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import config
from errors import RationalizationError, ResourceError, StructuralError
from logging_config import get_logger
from models import DataTable, KSInstance, QuantumRealization, StateVector
from table_core import require_valid

logger = get_logger("ontfactor.quantum")

# Unnormalized integer vectors; normalizers 1/sqrt(2) and 1/2 are applied by the Born ratio.
KERNAGHAN_VECTORS: Tuple[Tuple[int, int, int, int], ...] = (
    (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
    (0, 0, 1, 1), (0, 0, 1, -1), (1, -1, 0, 0), (0, 1, 0, 1),
    (1, 0, 1, 0), (0, 1, 0, -1), (1, 1, 1, 1), (1, -1, -1, 1),
    (1, 1, -1, -1), (0, 1, 1, 0), (0, 1, -1, 0), (1, 0, 0, -1),
    (-1, 1, 1, 1), (1, -1, 1, 1), (1, 1, -1, 1), (1, 1, 1, -1),
)

# Eleven four-outcome measurements, 1-based state numbers in outcome order.
KERNAGHAN_CONTEXTS: Tuple[Tuple[int, int, int, int], ...] = (
    (1, 2, 3, 4), (1, 2, 5, 6), (1, 3, 8, 10), (1, 4, 14, 15),
    (17, 18, 19, 20), (17, 19, 9, 10), (18, 19, 14, 16), (19, 20, 5, 7),
    (15, 16, 11, 12), (6, 7, 11, 13), (9, 8, 13, 12),
)

# Pauli eigenvectors over the Gaussian integers, in X, Y, Z order with + before -.
PAULI_LABELS = ("X+", "X-", "Y+", "Y-", "Z+", "Z-")
PAULI_VECTORS: Tuple[Tuple[complex, complex], ...] = (
    (1, 1), (1, -1), (1, 1j), (1, -1j), (1, 0), (0, 1),
)


# --------------------------------------------------------------------------- exact overlaps


def _exact_born(a: Sequence[complex], b: Sequence[complex]) -> Fraction:
    """|<a|b>|^2 / (|a|^2 |b|^2) for vectors with Gaussian-integer components."""
    pairs = [(int(x.real), int(x.imag), int(y.real), int(y.imag)) for x, y in zip(map(complex, a), map(complex, b))]
    re = sum(xr * yr + xi * yi for xr, xi, yr, yi in pairs)
    im = sum(xr * yi - xi * yr for xr, xi, yr, yi in pairs)
    norm_a = sum(xr * xr + xi * xi for xr, xi, _, _ in pairs)
    norm_b = sum(yr * yr + yi * yi for _, _, yr, yi in pairs)
    return Fraction(re * re + im * im, norm_a * norm_b)


def _exact_table(vectors, contexts, row_labels, prep_labels) -> DataTable:
    rows = []
    for context in contexts:
        for outcome in context:
            rows.append(tuple(_exact_born(vectors[outcome], psi) for psi in vectors))
    return DataTable(
        d=len(contexts[0]),
        m=len(contexts),
        s=len(vectors),
        entries=tuple(rows),
        row_labels=tuple(row_labels),
        prep_labels=tuple(prep_labels),
    )


def pauli_qubit_table() -> DataTable:
    contexts = ((0, 1), (2, 3), (4, 5))
    return _exact_table(PAULI_VECTORS, contexts, PAULI_LABELS, PAULI_LABELS)


def kernaghan_table() -> DataTable:
    contexts = tuple(tuple(n - 1 for n in context) for context in KERNAGHAN_CONTEXTS)
    row_labels = [f"psi{n}" for context in KERNAGHAN_CONTEXTS for n in context]
    prep_labels = [f"psi{n}" for n in range(1, len(KERNAGHAN_VECTORS) + 1)]
    return _exact_table(KERNAGHAN_VECTORS, contexts, row_labels, prep_labels)


def kernaghan_instance() -> KSInstance:
    return KSInstance(
        n_projectors=len(KERNAGHAN_VECTORS),
        contexts=tuple(tuple(n - 1 for n in context) for context in KERNAGHAN_CONTEXTS),
    )


# --------------------------------------------------------------------------- states and PVMs


def make_state(components: Sequence) -> np.ndarray:
    vector = np.asarray(components, dtype=complex)
    norm = np.linalg.norm(vector)
    if norm == 0:
        raise ValueError("zero vector is not a state")
    return vector / norm


def state_vector(vector: np.ndarray) -> StateVector:
    return tuple((float(z.real), float(z.imag)) for z in np.asarray(vector, dtype=complex))


def check_pvm(elements: Sequence[Sequence[np.ndarray]], dim: int, tol: float = 1e-10) -> None:
    """Every spanning vector has length dim and all of them together are orthonormal."""
    vectors = [np.asarray(v, dtype=complex) for element in elements for v in element]
    if not vectors:
        raise StructuralError("PVM spans nothing")
    for v in vectors:
        if v.shape != (dim,):
            raise StructuralError(f"PVM vector of shape {v.shape} in dimension {dim}")
    if len(vectors) > dim:
        raise StructuralError(f"PVM spans {len(vectors)} directions in dimension {dim}")
    stacked = np.vstack(vectors)
    gram = stacked.conj() @ stacked.T
    error = float(np.max(np.abs(gram - np.eye(len(vectors)))))
    if error > tol:
        raise StructuralError(f"PVM vectors are not orthonormal (max Gram error {error:.3e})")


def realization_states(realization: QuantumRealization) -> np.ndarray:
    return np.array(
        [[complex(re, im) for re, im in state] for state in realization.states],
        dtype=complex,
    ).reshape(len(realization.states), realization.dim)


def realization_pvms(realization: QuantumRealization) -> List[List[np.ndarray]]:
    return [
        [
            np.array([[complex(re, im) for re, im in v] for v in element], dtype=complex).reshape(
                len(element), realization.dim
            )
            for element in pvm
        ]
        for pvm in realization.pvms
    ]


def kernaghan_realization() -> QuantumRealization:
    states = [make_state(v) for v in KERNAGHAN_VECTORS]
    pvms = tuple(
        tuple((state_vector(states[n - 1]),) for n in context)
        for context in KERNAGHAN_CONTEXTS
    )
    return QuantumRealization(dim=4, states=tuple(state_vector(s) for s in states), pvms=pvms)


# --------------------------------------------------------------------------- Born rule


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Smallest-denominator rational in [lo, hi] (continued-fraction descent)."""
    floor_lo = math.floor(lo)
    if floor_lo == lo:
        return Fraction(floor_lo)
    if floor_lo < math.floor(hi):
        return Fraction(floor_lo + 1)
    return floor_lo + 1 / _simplest_between(1 / (hi - floor_lo), 1 / (lo - floor_lo))


def rationalize(x: float, tol: float) -> Fraction:
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    exact = Fraction(x)
    tol = Fraction(tol)
    return _simplest_between(exact - tol, exact + tol)


def born_table(
    states: Sequence,
    pvms: Sequence[Sequence[Sequence]],
    rationalize_tol: Optional[float] = None,
    row_labels: Optional[Sequence[str]] = None,
    prep_labels: Optional[Sequence[str]] = None,
) -> DataTable:
    """Rationalized Born probabilities; each block column is renormalized exactly by
    assigning the residual to its largest entry (first on ties)."""
    tol = config.RATIONALIZE_TOL if rationalize_tol is None else rationalize_tol
    if tol <= 0:
        raise ValueError("rationalize_tol must be positive")
    if not states or not pvms:
        raise StructuralError("born_table needs at least one state and one measurement")

    vectors = [make_state(s) for s in states]
    dim = len(vectors[0])
    for k, vector in enumerate(vectors):
        if len(vector) != dim:
            raise StructuralError(f"state {k} has dimension {len(vector)}, expected {dim}")
    psi = np.vstack(vectors)
    d = len(pvms[0])
    if any(len(pvm) != d for pvm in pvms):
        raise StructuralError("every PVM must have the same number of outcomes")
    for x, pvm in enumerate(pvms):
        try:
            check_pvm([[make_state(v) for v in element] for element in pvm], dim)
        except StructuralError as exc:
            raise StructuralError(f"measurement {x}: {exc}") from exc

    columns = [[] for _ in range(len(states))]
    for x, pvm in enumerate(pvms):
        probabilities = np.zeros((d, len(states)))
        for i, element in enumerate(pvm):
            if element:
                basis = np.vstack([make_state(v) for v in element])
                probabilities[i] = (np.abs(basis.conj() @ psi.T) ** 2).sum(axis=0)
        for k in range(len(states)):
            block = [rationalize(float(p), tol) for p in probabilities[:, k]]
            residual = 1 - sum(block, Fraction(0))
            if abs(residual) > d * tol:
                raise RationalizationError(
                    f"measurement {x}, preparation {k}: residual {float(residual):.3e} exceeds d*tol"
                )
            if residual:
                largest = max(range(d), key=lambda i: (block[i], -i))
                block[largest] += residual
            columns[k].extend(block)

    entries = tuple(tuple(columns[k][r] for k in range(len(states))) for r in range(d * len(pvms)))
    table = DataTable(
        d=d,
        m=len(pvms),
        s=len(states),
        entries=entries,
        row_labels=tuple(row_labels) if row_labels is not None else None,
        prep_labels=tuple(prep_labels) if prep_labels is not None else None,
    )
    require_valid(table)
    return table


def qutrit_counterexample_table() -> DataTable:
    """Two preparations, two binary measurements on a qutrit: [[1,0],[0,1] ; [1,1/2],[0,1/2]]."""
    e0, e1, e2 = np.eye(3, dtype=complex)
    plus = (e1 + e2) / math.sqrt(2)
    minus = (e1 - e2) / math.sqrt(2)
    pvms = [
        [[e0, e2], [e1]],
        [[e0, plus], [minus]],
    ]
    return born_table([e0, e1], pvms)


# --------------------------------------------------------------------------- realization


def _orthogonal_completion(first_row: np.ndarray) -> np.ndarray:
    """Real orthogonal matrix with the given unit first row; standard basis seeds in index order."""
    d = first_row.shape[0]
    rows = [first_row]
    for seed_index in range(d):
        if len(rows) == d:
            break
        w = np.zeros(d)
        w[seed_index] = 1.0
        # two Gram-Schmidt sweeps keep the completion orthogonal to 1e-15
        for _ in range(2):
            for r in rows:
                w = w - np.dot(r, w) * r
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            rows.append(w / norm)
    return np.vstack(rows)


def realize(table: DataTable) -> QuantumRealization:
    """Preparation k is the first basis vector of its private d-dimensional subspace; outcome i
    of measurement x projects onto column i of a unitary whose first row is the square root of
    the block column, summed directly over all subspaces."""
    require_valid(table)
    d, m, s = table.d, table.m, table.s
    dim = s * d

    states = []
    for k in range(s):
        e = np.zeros(dim, dtype=complex)
        e[k * d] = 1.0
        states.append(state_vector(e))

    pvms = []
    for x in range(m):
        elements = [[] for _ in range(d)]
        for k in range(s):
            amplitudes = np.sqrt(np.array([float(table.value(x, i, k)) for i in range(d)]))
            amplitudes = amplitudes / np.linalg.norm(amplitudes)
            unitary = _orthogonal_completion(amplitudes)
            for i in range(d):
                v = np.zeros(dim, dtype=complex)
                v[k * d:(k + 1) * d] = unitary[:, i]
                elements[i].append(state_vector(v))
        pvms.append(tuple(tuple(element) for element in elements))

    realization = QuantumRealization(dim=dim, states=tuple(states), pvms=tuple(pvms))
    error = verify_realization(table, realization)
    if error > config.REALIZATION_TOL:
        logger.warning("realization error %.3e exceeds tolerance %.1e", error, config.REALIZATION_TOL)
    else:
        logger.info("realized d=%d m=%d s=%d in dimension %d (max error %.2e)", d, m, s, dim, error)
    return realization


def verify_realization(table: DataTable, realization: QuantumRealization) -> float:
    """Largest absolute gap between the realization's Born values and the table."""
    d, m, s = table.d, table.m, table.s
    if len(realization.states) != s:
        raise StructuralError(f"realization has {len(realization.states)} states, table has {s} preparations")
    if len(realization.pvms) != m:
        raise StructuralError(f"realization has {len(realization.pvms)} measurements, table has {m}")
    for x, pvm in enumerate(realization.pvms):
        if len(pvm) != d:
            raise StructuralError(f"measurement {x} has {len(pvm)} outcomes, table has {d}")
        for element in pvm:
            if any(len(v) != realization.dim for v in element):
                raise StructuralError(f"measurement {x} has a vector outside dimension {realization.dim}")
    if any(len(state) != realization.dim for state in realization.states):
        raise StructuralError(f"a state lies outside dimension {realization.dim}")

    psi = realization_states(realization)
    expected = np.array([[float(v) for v in row] for row in table.entries]).reshape(d * m, s)
    worst = 0.0
    for x, pvm in enumerate(realization_pvms(realization)):
        for i, basis in enumerate(pvm):
            if basis.shape[0] == 0:
                born = np.zeros(s)
            else:
                born = (np.abs(basis.conj() @ psi.T) ** 2).sum(axis=0)
            worst = max(worst, float(np.max(np.abs(born - expected[x * d + i]))))
    return worst


# --------------------------------------------------------------------------- Kochen-Specker


def ks_parity_obstruction(instance: KSInstance) -> bool:
    """True when every projector occurs an even number of times over an odd number of contexts,
    which rules out any exactly-one-per-context assignment."""
    counts = Counter(p for context in instance.contexts for p in context)
    all_even = all(counts.get(p, 0) % 2 == 0 for p in range(instance.n_projectors))
    return all_even and len(instance.contexts) % 2 == 1


def ks_noncontextual_search(instance: KSInstance, cap: Optional[int] = None) -> Optional[List[bool]]:
    """First assignment (projector order, True tried before False) giving every context exactly
    one true projector, or None if there is none."""
    cap = config.KS_PROJECTOR_CAP if cap is None else cap
    n = instance.n_projectors
    if n > cap:
        raise ResourceError(f"{n} projectors exceed the exhaustive search cap {cap} (config.KS_PROJECTOR_CAP)")

    contexts_of: List[List[int]] = [[] for _ in range(n)]
    for c, context in enumerate(instance.contexts):
        for p in context:
            contexts_of[p].append(c)
    trues = [0] * len(instance.contexts)
    open_slots = [len(context) for context in instance.contexts]
    assignment: List[Optional[bool]] = [None] * n
    nodes = 0

    def consistent(p: int) -> bool:
        return all(
            trues[c] <= 1 and not (open_slots[c] == 0 and trues[c] == 0)
            for c in contexts_of[p]
        )

    def search(p: int) -> bool:
        nonlocal nodes
        if p == n:
            return True
        for value in (True, False):
            nodes += 1
            assignment[p] = value
            for c in contexts_of[p]:
                open_slots[c] -= 1
                trues[c] += value
            if consistent(p) and search(p + 1):
                return True
            for c in contexts_of[p]:
                open_slots[c] += 1
                trues[c] -= value
        assignment[p] = None
        return False

    found = search(0)
    logger.info(
        "KS search over %d projectors, %d contexts: %s after %d nodes",
        n, len(instance.contexts), "assignment found" if found else "no assignment", nodes,
    )
    return list(assignment) if found else None
