import pytest
from fastapi.testclient import TestClient

from api import app, status_for
from errors import InvalidTableError, RationalizationError, ResourceError, StructuralError, TableParseError
from factorization import pauli_optimal_factorization
from models import DataTable, as_grid


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def _table_json(table):
    return table.model_dump(mode="json", exclude_none=True)


def test_manifest(client):
    response = client.get("/manifest")
    assert response.status_code == 200
    body = response.json()
    assert body["name"] == "ontfactor"
    assert "binary-worst" in body["tables"]


def test_get_table(client):
    body = client.get("/tables/pauli").json()
    assert body["entries"][0][0] == "1"
    assert body["entries"][0][4] == "1/2"
    assert client.get("/tables/binary-worst", params={"m": 2}).json()["s"] == 4
    assert client.get("/tables/nonsense").status_code == 422


def test_validate_and_bounds(client, pauli):
    assert client.post("/tables/validate", json=_table_json(pauli)).json() == {"valid": True, "violations": []}
    bounds = client.post("/tables/bounds", json=_table_json(pauli)).json()
    assert bounds["rank_lb"] == 4
    assert bounds["upper_det_model2"] == 8


def test_factor_and_verify(client, three_outcome):
    response = client.post("/factorizations", json={"table": _table_json(three_outcome), "model": 2})
    assert response.status_code == 200
    factorization = response.json()
    assert factorization["omega"] == 9
    assert factorization["P"][3] == ["1/9", "1/6"]
    report = client.post(
        "/factorizations/verify",
        json={"table": _table_json(three_outcome), "factorization": factorization},
    ).json()
    assert report["valid"]


def test_compress_exhaustive(client, pauli):
    table = _table_json(pauli)
    factorization = client.post("/factorizations", json={"table": table, "model": 1, "determinize": True}).json()
    response = client.post(
        "/factorizations/compress",
        json={"table": table, "factorization": factorization, "method": 1, "exhaustive": True},
    )
    assert response.status_code == 200
    body = response.json()
    assert (body["omega_before"], body["omega_after"]) == (12, 4)


def test_analyze(client, pauli):
    body = client.post(
        "/factorizations/analyze",
        json={"table": _table_json(pauli), "factorization": pauli_optimal_factorization().model_dump(mode="json")},
    ).json()
    assert body["rank_bound_holds"]
    assert body["witnesses"] == [None, None, None, None]


def test_realize(client):
    table = client.get("/tables/qutrit").json()
    body = client.post("/realizations", json=table).json()
    assert body["within_tolerance"]
    assert body["realization"]["dim"] == 4


def test_invalid_table_is_422_with_report(client):
    table = {"d": 2, "m": 1, "s": 1, "entries": [["1/2"], ["1/3"]]}
    response = client.post("/factorizations", json={"table": table, "model": 1})
    assert response.status_code == 422
    body = response.json()
    assert body["error"] == "InvalidTableError"
    assert body["report"]["violations"][0]["kind"] == "column-sum"


def test_float_tokens_are_422(client):
    response = client.post("/tables/validate", json={"d": 2, "m": 1, "s": 1, "entries": [[0.5], [0.5]]})
    assert response.status_code == 422


def test_model2_cap_is_413(client):
    table = DataTable(d=2, m=25, s=1, entries=as_grid([[1], [0]] * 25))
    response = client.post("/factorizations", json={"table": _table_json(table), "model": 2})
    assert response.status_code == 413
    assert response.json()["error"] == "ResourceError"


def test_status_mapping():
    assert status_for(TableParseError("bad", "entries")) == 422
    assert status_for(StructuralError("shape")) == 422
    assert status_for(InvalidTableError("invalid")) == 422
    assert status_for(ResourceError("cap")) == 413
    assert status_for(RationalizationError("irrational")) == 400
