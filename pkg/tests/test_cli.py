import json


from hgreen.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_factor_161(capsys):
    code, doc = run_cli(capsys, "factor", "--k", "4", "--d1", "-7", "--d2", "-23",
                        "--pp", "1=1")
    assert code == 0
    assert doc["kappa"] == 1
    exps = {(e["p"], e["e_num"], e["e_den"]) for e in doc["exponents"]}
    assert exps == {(5, 2878, 1), (17, 3580, 1), (19, 2628, 1)}


def test_factor_idempotent(capsys):
    code1, doc1 = run_cli(capsys, "factor", "--k", "4", "--d1", "-7", "--d2", "-23",
                          "--pp", "1=1")
    code2, doc2 = run_cli(capsys, "factor", "--k", "4", "--d1", "-7", "--d2", "-23",
                          "--pp", "1=1")
    assert doc1 == doc2


def test_verify_non_coprime_is_invalid(capsys):
    code = main(["verify", "--k", "4", "--d1", "-7", "--d2", "-7", "--pp", "1=1"])
    assert code == 2


def test_verify_obstructed_is_invalid(capsys):
    code = main(["verify", "--k", "12", "--d1", "-4", "--d2", "-7", "--pp", "1=1"])
    assert code == 2


def test_bad_discriminant_is_invalid(capsys):
    assert main(["factor", "--k", "4", "--d1", "-12", "--d2", "-7", "--pp", "1=1"]) == 2
    assert main(["factor", "--k", "4", "--d1", "7", "--d2", "-23", "--pp", "1=1"]) == 2
    assert main(["factor", "--k", "3", "--d1", "-7", "--d2", "-23", "--pp", "1=1"]) == 2


def test_verify_k2_case(capsys):
    code, doc = run_cli(capsys, "verify", "--k", "2", "--d1", "-4", "--d2", "-7",
                        "--pp", "1=1", "--tol", "1e-5")
    assert code == 0
    assert doc["exponents"] == []
    assert doc["unit_power_rational"] == "4"
    assert doc["residual"] < 1e-5
    assert doc["converged"] is True
    # schema stability
    assert set(doc) >= {"command", "k", "d1", "d2", "pp", "Delta", "precision",
                        "tol", "lhs", "kappa", "exponents", "unit_power",
                        "residual", "rhs_value", "converged"}


def test_greens_json(capsys, tmp_path):
    out = tmp_path / "g.json"
    code = main(["greens", "--k", "4", "--d1", "-4", "--d2", "-7",
                 "--pp", "1=1", "--tol", "1e-6", "--output", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["command"] == "greens"
    assert doc["precision"] == 30
    assert doc["converged"] is True
    float(doc["value"])  # parses as a number


def test_selftest_quick(capsys):
    code, doc = run_cli(capsys, "selftest", "--seed", "7", "--quick")
    assert code == 0
    assert doc["pass"] is True
    names = {s["suite"] for s in doc["suites"]}
    assert names == {"counting_oracle", "route_equality", "slice_identity",
                     "legendre_recurrence", "genus_congruences"}


def test_selftest_deterministic(capsys):
    _, doc1 = run_cli(capsys, "selftest", "--seed", "3", "--quick")
    _, doc2 = run_cli(capsys, "selftest", "--seed", "3", "--quick")
    assert doc1 == doc2
