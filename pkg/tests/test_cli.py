import json

import pytest

from cli import EXIT_INVALID, EXIT_OK, EXIT_USAGE, run
from factorization import model1, pauli_optimal_factorization
from models import OntFactorization, as_grid
from table_core import parse_table, serialize_table


@pytest.fixture
def pauli_file(tmp_path, pauli):
    path = tmp_path / "pauli.json"
    path.write_bytes(serialize_table(pauli))
    return path


def _json(path):
    return json.loads(path.read_text())


def test_gen_writes_parseable_table(tmp_path, pauli):
    out = tmp_path / "table.json"
    assert run(["gen", "pauli", "--out", str(out)]) == EXIT_OK
    assert parse_table(out.read_bytes()) == pauli


def test_bounds(tmp_path, pauli_file):
    out = tmp_path / "bounds.json"
    assert run(["bounds", str(pauli_file), "--out", str(out)]) == EXIT_OK
    report = _json(out)
    assert report["rank_lb"] == 4
    assert report["lower"] == 4


def test_kernaghan_determinized_pipeline(tmp_path):
    table = tmp_path / "k.json"
    factorization = tmp_path / "k_of.json"
    report = tmp_path / "report.json"
    assert run(["gen", "kernaghan", "--out", str(table)]) == EXIT_OK
    assert run([
        "factor", str(table), "--model", "1", "--determinize", "--policy", "random", "--seed", "7",
        "--out", str(factorization),
    ]) == EXIT_OK
    assert _json(factorization)["omega"] == 80
    assert run(["verify", str(table), str(factorization), "--out", str(report)]) == EXIT_OK
    assert _json(report)["valid"]


def test_factor_is_byte_reproducible(tmp_path, pauli_file):
    outputs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        args = ["factor", str(pauli_file), "--model", "1", "--determinize", "--policy", "random", "--seed", "3"]
        assert run(args + ["--out", str(out)]) == EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_verify_product_mismatch_exits_one(tmp_path, pauli, pauli_file):
    swapped = model1(pauli)
    rows = [list(row) for row in swapped.P]
    rows[0], rows[1] = rows[1], rows[0]
    path = tmp_path / "bad.json"
    path.write_text(OntFactorization.build(swapped.M, as_grid(rows)).model_dump_json())
    out = tmp_path / "report.json"
    assert run(["verify", str(pauli_file), str(path), "--out", str(out)]) == EXIT_INVALID
    assert not _json(out)["valid"]


def test_verify_shape_mismatch_exits_two(tmp_path, three_outcome):
    table = tmp_path / "t.json"
    table.write_bytes(serialize_table(three_outcome))
    factorization = tmp_path / "of.json"
    factorization.write_text(pauli_optimal_factorization().model_dump_json())
    assert run(["verify", str(table), str(factorization)]) == EXIT_USAGE


def test_invalid_table_exits_one(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"d": 2, "m": 1, "s": 1, "entries": [["1/2"], ["1/3"]]}')
    assert run(["factor", str(path), "--model", "1"]) == EXIT_INVALID


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["factor"],
        ["factor", "x.json", "--model", "4"],
        ["gen", "binary-worst"],
        ["gen", "random", "--d", "1", "--m", "1", "--s", "1"],
        ["gen", "random", "--d", "2", "--m", "0", "--s", "1"],
        ["compress", "t.json", "of.json", "--method", "1", "--restarts", "0"],
        ["compress", "t.json", "of.json", "--method", "1", "--iterations", "0"],
    ],
)
def test_usage_errors(argv):
    assert run(argv) == EXIT_USAGE


def test_missing_file(tmp_path):
    assert run(["bounds", str(tmp_path / "nope.json")]) == EXIT_USAGE


def test_float_tokens_are_refused(tmp_path):
    path = tmp_path / "float.json"
    path.write_text('{"d": 2, "m": 1, "s": 1, "entries": [[0.5], [0.5]]}')
    assert run(["bounds", str(path)]) == EXIT_USAGE


def test_exhaustive_compress_pauli(tmp_path, pauli_file):
    factorization = tmp_path / "of.json"
    out = tmp_path / "compressed.json"
    assert run(["factor", str(pauli_file), "--model", "1", "--determinize", "--out", str(factorization)]) == EXIT_OK
    assert run([
        "compress", str(pauli_file), str(factorization), "--method", "1", "--exhaustive", "--out", str(out),
    ]) == EXIT_OK
    assert _json(out)["omega"] == 4


def test_analyze(tmp_path, pauli_file):
    factorization = tmp_path / "of.json"
    factorization.write_text(pauli_optimal_factorization().model_dump_json())
    out = tmp_path / "analysis.json"
    assert run(["analyze", str(pauli_file), str(factorization), "--out", str(out)]) == EXIT_OK
    report = _json(out)
    assert report["rank_bound_holds"]
    assert report["psi"]["psi_epistemic"]


def test_realize_qutrit(tmp_path):
    table = tmp_path / "q.json"
    out = tmp_path / "r.json"
    assert run(["gen", "qutrit", "--out", str(table)]) == EXIT_OK
    assert run(["realize", str(table), "--out", str(out)]) == EXIT_OK
    assert _json(out)["dim"] == 4


def test_ks_check(tmp_path):
    out = tmp_path / "ks.json"
    assert run(["ks-check", "kernaghan", "--out", str(out)]) == EXIT_OK
    assert _json(out) == {
        "n": 20, "contexts": 11, "parity_obstruction": True, "satisfiable": False, "assignment": None,
    }
    instance = tmp_path / "instance.json"
    instance.write_text('{"n": 2, "contexts": [[0, 1]]}')
    assert run(["ks-check", str(instance), "--out", str(out)]) == EXIT_OK
    assert _json(out)["assignment"] == [True, False]


def test_ks_check_refuses_empty_context(tmp_path):
    instance = tmp_path / "instance.json"
    instance.write_text('{"n": 1, "contexts": [[0], []]}')
    assert run(["ks-check", str(instance)]) == EXIT_USAGE


def test_render_table_and_factorization(tmp_path, pauli_file):
    image = tmp_path / "pauli.ppm"
    assert run(["render", str(pauli_file), "--cell-px", "2", "--out", str(image)]) == EXIT_OK
    assert image.read_bytes().startswith(b"P6\n12 14\n255\n")

    factorization = tmp_path / "of.json"
    factorization.write_text(pauli_optimal_factorization().model_dump_json())
    svg = tmp_path / "of.svg"
    assert run(["render", str(factorization), "--format", "svg", "--block-size", "2", "--out", str(svg)]) == EXIT_OK
    assert svg.read_bytes().startswith(b"<svg")
    assert run(["render", str(pauli_file), "--cell-px", "0"]) == EXIT_USAGE
