"""CLI surface: subcommands, exit codes, determinism, schema conformance."""

import json

import pytest

from dunklalg.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_json(capsys):
    code, out, _ = run_cli(capsys, "verify", "--system", "A1",
                           "--identities", "com_nn,x_pi,s_center",
                           "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["failed"] == 0 and data["passed"] == 3
    assert all("millis" not in r for r in data["reports"])


def test_verify_unsupported_field(capsys):
    code, _, err = run_cli(capsys, "verify", "--system", "I2_5")
    assert code == 2
    assert "I2(5)" in err


def test_usage_error(capsys):
    code, _, _ = run_cli(capsys, "verify")
    assert code == 2


def test_rewrite_text(capsys):
    code, out, _ = run_cli(capsys, "rewrite", "--system", "B2",
                           "A(1)*L(1,2)", "--check")
    assert code == 0
    assert "L(1,2)*A(1)" in out
    assert "rho-consistency: ok" in out


def test_rewrite_budget_exit(capsys):
    code, _, err = run_cli(capsys, "rewrite", "--system", "B2",
                           "A(2)*A(1)*L(1,2)", "--budget", "2")
    assert code == 3
    assert "budget" in err


def test_basis_with_rank(capsys):
    code, out, _ = run_cli(capsys, "basis", "--system", "B2", "--degree", "2",
                           "--no-h", "--rank", "--format", "json", "--seed", "3")
    assert code == 0
    data = json.loads(out)
    assert data["count"] == 9
    assert data["independence_rank"] == 9


def test_phi(capsys):
    code, out, _ = run_cli(capsys, "phi", "--system", "B2", "--central", "-1",
                           "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["status"] == "pass"
    code2, _, err = run_cli(capsys, "phi", "--system", "B2", "--central", "2")
    assert code2 == 2


def test_gamma_and_g_values(capsys):
    code, out, _ = run_cli(capsys, "verify", "--system", "A1",
                           "--gamma", "0", "--g", "1/2",
                           "--identities", "com_nn", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["params"]["gam"] == "0"
    assert data["params"]["g"] == "1/2"


def test_determinism_bytes(capsys, tmp_path):
    argv = ["verify", "--system", "A1", "--identities", "com_nn,lem1",
            "--format", "json"]
    _, out1, _ = run_cli(capsys, *argv)
    _, out2, _ = run_cli(capsys, *argv)
    assert out1 == out2
    f1, f2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--out", str(f1)]) == 0
    assert main(argv + ["--out", str(f2)]) == 0
    assert f1.read_bytes() == f2.read_bytes()


def test_out_file(capsys, tmp_path):
    path = tmp_path / "report.json"
    code = main(["verify", "--system", "A1", "--identities", "com_nn",
                 "--format", "json", "--out", str(path)])
    assert code == 0
    data = json.loads(path.read_text())
    assert data["passed"] == 1


def test_superint_cli(capsys):
    code, out, _ = run_cli(capsys, "superint", "--system", "A1xA1",
                           "--degree", "4", "--test-degree", "4",
                           "--seed", "5", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["rank"] == data["target"] == 3
    assert data["status"] == "pass"


def test_superint_schema(capsys):
    jsonschema = pytest.importorskip("jsonschema")
    import importlib.resources as res

    code, out, _ = run_cli(capsys, "superint", "--system", "A1xA1",
                           "--degree", "4", "--test-degree", "4",
                           "--seed", "5", "--format", "json")
    assert code == 0
    with res.files("dunklalg.schemas").joinpath(
            "integral_certificate.schema.json").open() as fh:
        schema = json.load(fh)
    jsonschema.validate(json.loads(out), schema)
