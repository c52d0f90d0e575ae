import os
import tempfile
from pathlib import Path

# Configuration is read at import time: point logs at a scratch file and run Celery inline.
os.environ.setdefault("ONTFACTOR_LOG_FILE", str(Path(tempfile.gettempdir()) / "ontfactor-tests" / "ontfactor.log"))
os.environ.setdefault("ONTFACTOR_CELERY_EAGER", "true")

import pytest

from factorization import determinize, model1
from quantum_gen import kernaghan_table, pauli_qubit_table
from table_core import three_outcome_example_table, two_preparation_example_table


@pytest.fixture(scope="session")
def pauli():
    return pauli_qubit_table()


@pytest.fixture(scope="session")
def kernaghan():
    return kernaghan_table()


@pytest.fixture(scope="session")
def kernaghan_deterministic(kernaghan):
    return determinize(kernaghan, model1(kernaghan))


@pytest.fixture
def three_outcome():
    return three_outcome_example_table()


@pytest.fixture
def two_preparation():
    return two_preparation_example_table()
