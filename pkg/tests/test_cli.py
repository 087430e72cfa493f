import json
import subprocess
import sys

import pytest

from gradedpi.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def cert_from(out: str) -> dict:
    """Certificate JSON is the trailing block of stdout."""
    start = out.index('{\n  "certificate_version"')
    return json.loads(out[start:])


def test_regularity_regular(capsys):
    code, out, err = run_cli(capsys, "regularity", "--group", "2", "--targets", "0,1")
    assert code == 0
    cert = cert_from(out)
    assert cert["certificate_version"] == 1
    assert cert["command"] == "regularity"
    assert cert["result"]["regular"] is True
    assert cert["result"]["fibers"] == {"0": 1, "1": 1}


def test_regularity_negative_still_exit_zero(capsys):
    code, out, _ = run_cli(capsys, "regularity", "--group", "2", "--targets", "0,0,1")
    assert code == 0
    cert = cert_from(out)
    assert cert["result"]["regular"] is False
    assert cert["result"]["equipotent"] is False
    code, out, _ = run_cli(capsys, "regularity", "--group", "2,2", "--targets", "0.0,1.1")
    assert code == 0
    assert cert_from(out)["result"]["surjective"] is False


def test_identities_evaluation_route(capsys):
    code, out, _ = run_cli(
        capsys,
        "identities",
        "--algebra", "grassmann:deg=natural",
        "--sig", "1,1",
        "--basis",
    )
    assert code == 0
    cert = cert_from(out)
    assert cert["result"]["dim"] == 1
    assert cert["result"]["basis"] == ["z1*z2 + z2*z1"]
    assert cert["result"]["stabilization"]["stabilized"] is True
    assert cert["config"]["signature"] == [[1], [1]]


def test_identities_generators_route(capsys, tmp_path):
    gens = tmp_path / "gens.txt"
    gens.write_text("# generating identities\n[[x1, x2], x3]\n", encoding="utf-8")
    code, out, _ = run_cli(
        capsys,
        "identities",
        "--generators", str(gens),
        "--group", "1",
        "--sig", "0,0,0",
    )
    assert code == 0
    cert = cert_from(out)
    assert cert["result"]["dim"] == 2
    assert cert["result"]["routes"] == {"consequences": {"dim": 2, "meta": cert["result"]["routes"]["consequences"]["meta"]}}
    gens_echo = cert["config"]["generator_polynomials"]
    assert len(gens_echo) == 1 and "y1*y2*y3" in gens_echo[0]


def test_identities_both_routes_agree(capsys, tmp_path):
    gens = tmp_path / "gens.txt"
    gens.write_text("z1*z2 + z2*z1\n[y1, y2]\n[y1, z2]\n", encoding="utf-8")
    code, out, _ = run_cli(
        capsys,
        "identities",
        "--algebra", "grassmann:deg=natural",
        "--generators", str(gens),
        "--sig", "1,1,0",
    )
    assert code == 0
    cert = cert_from(out)
    assert cert["result"]["routes_agree"] is True
    routes = cert["result"]["routes"]
    assert routes["evaluation"]["dim"] == routes["consequences"]["dim"] == cert["result"]["dim"]


def test_identities_route_disagreement_exits_2(capsys, tmp_path):
    gens = tmp_path / "gens.txt"
    gens.write_text("[y1, y2]\n", encoding="utf-8")
    code, out, err = run_cli(
        capsys,
        "identities",
        "--algebra", "grassmann:deg=natural",
        "--generators", str(gens),
        "--sig", "1,1",
    )
    assert code == 2
    assert "disagree" in (out + err).lower()


def test_identities_needs_some_input(capsys):
    code, _, err = run_cli(capsys, "identities", "--sig", "1,1")
    assert code == 1


def test_identities_degk_exits_4(capsys):
    code, _, err = run_cli(
        capsys,
        "identities",
        "--algebra", "grassmann:deg=degk",
        "--sig", "1,1",
    )
    assert code == 4
    assert "unsupported" in err.lower()


def test_identities_guard_exits_3(capsys):
    code, _, err = run_cli(
        capsys,
        "identities",
        "--algebra", "grassmann:deg=natural",
        "--sig", "1,1,1,1",
        "--max-cells", "10",
    )
    assert code == 3
    assert "guard" in err.lower()


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["identities", "--algebra", "grassmann:deg=natural"])  # no --sig
    assert ei.value.code == 1
    with pytest.raises(SystemExit) as ei:
        main(["no-such-command"])
    assert ei.value.code == 1
    assert main([]) == 1
    capsys.readouterr()


def test_bad_signature_exits_1(capsys):
    code, _, err = run_cli(
        capsys,
        "identities", "--algebra", "grassmann:deg=natural", "--sig", "1,a",
    )
    assert code == 1


def test_factor_check_kstar_witness(capsys):
    code, out, _ = run_cli(
        capsys,
        "factor-check",
        "--shape", "1,1",
        "--entries", "grassmann:deg=kstar,k=1",
        "--sig", "1,1",
    )
    assert code == 0
    cert = cert_from(out)
    row = cert["result"]["verdicts"][0]
    assert row["relation"] == "product_strictly_inside"
    assert row["witness"] == "z1*z2"
    assert cert["result"]["all_equal"] is False


def test_factor_check_natural_sweep(capsys):
    code, out, _ = run_cli(
        capsys,
        "factor-check",
        "--shape", "1,1",
        "--entries", "grassmann:deg=natural",
        "--sweep", "2",
        "--bordered",
    )
    assert code == 0
    cert = cert_from(out)
    rows = cert["result"]["verdicts"]
    # sweep covers nondecreasing signatures of every length up to the bound:
    # (0), (1), (0,0), (0,1), (1,1)
    assert len(rows) == 5
    assert all(r["relation"] == "equal" for r in rows)
    assert cert["result"]["all_equal"] is True


def test_factor_check_field_targets(capsys):
    code, out, _ = run_cli(
        capsys,
        "factor-check",
        "--shape", "1,1",
        "--targets", "0,1",
        "--group", "2",
        "--sweep", "2",
    )
    assert code == 0
    cert = cert_from(out)
    assert cert["result"]["verdicts"]
    for row in cert["result"]["verdicts"]:
        assert row["relation"] in ("equal", "product_strictly_inside")


def test_factor_check_ungraded_field(capsys):
    code, out, _ = run_cli(
        capsys,
        "factor-check", "--shape", "1,1", "--sig", "0,0",
    )
    assert code == 0
    cert = cert_from(out)
    assert cert["result"]["verdicts"][0]["relation"] == "equal"


def test_factor_check_needs_sig_or_sweep(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["factor-check", "--shape", "1,1"])
    assert ei.value.code == 1
    capsys.readouterr()


def test_model_eval_identity(capsys):
    code, out, _ = run_cli(
        capsys,
        "model", "eval",
        "--shape", "1,1",
        "--mode", "natural",
        "--poly", "[y1, y2]*[y3, y4]",
    )
    assert code == 0
    cert = cert_from(out)
    assert cert["result"]["is_identity"] is True
    assert set(cert["result"]["entries"]) == {"1,1", "1,2", "2,2"}
    assert all(v == "0" for v in cert["result"]["entries"].values())


def test_model_eval_non_identity(capsys):
    code, out, _ = run_cli(
        capsys,
        "model", "eval",
        "--shape", "1,1",
        "--mode", "natural",
        "--poly", "[y1, y2]",
    )
    assert code == 0
    cert = cert_from(out)
    assert cert["result"]["is_identity"] is False
    assert cert["result"]["entries"]["1,1"] == "0"
    assert cert["result"]["entries"]["1,2"] != "0"


def test_model_eval_degk_exits_4(capsys):
    code, _, err = run_cli(
        capsys,
        "model", "eval", "--shape", "1,1", "--mode", "degk:1", "--poly", "[y1, y2]",
    )
    assert code == 4
    assert "catalogue" in err


def test_relfree_nf(capsys):
    code, out, _ = run_cli(
        capsys, "relfree", "nf", "--mode", "natural", "--poly", "z2*z1",
    )
    assert code == 0
    cert = cert_from(out)
    assert cert["result"]["normal_form"] == "-z1*z2"
    code, out, _ = run_cli(
        capsys, "relfree", "nf", "--mode", "kstar:1", "--poly", "z1*z2",
    )
    assert cert_from(out)["result"]["normal_form"] == "0"


def test_relfree_multbasis(capsys):
    code, out, _ = run_cli(
        capsys,
        "relfree", "multbasis", "--mode", "kstar:1",
        "--bound", "3", "--samples", "50", "--seed", "0",
    )
    assert code == 0
    cert = cert_from(out)
    assert cert["result"]["verdict"] == "fails"
    assert cert["result"]["witness"]
    code, out, _ = run_cli(
        capsys,
        "relfree", "multbasis", "--mode", "natural",
        "--bound", "3", "--samples", "50", "--seed", "0",
    )
    assert cert_from(out)["result"]["verdict"] == "holds-on-samples"


def test_certificates_byte_identical(capsys, tmp_path):
    for args in [
        ["identities", "--algebra", "grassmann:deg=natural", "--sig", "1,1", "--basis"],
        ["factor-check", "--shape", "1,1", "--entries", "grassmann:deg=kstar,k=1", "--sig", "1,1"],
        ["relfree", "multbasis", "--mode", "infty", "--bound", "3", "--samples", "40", "--seed", "5"],
        ["regularity", "--group", "2", "--targets", "0,1"],
    ]:
        p1 = tmp_path / "a.json"
        p2 = tmp_path / "b.json"
        assert main(args + ["--out", str(p1)]) == 0
        assert main(args + ["--out", str(p2)]) == 0
        capsys.readouterr()
        assert p1.read_bytes() == p2.read_bytes()
        assert p1.read_bytes().endswith(b"\n")


def test_certificate_echoes_config_for_rerun(capsys, tmp_path):
    p = tmp_path / "c.json"
    code, out, _ = run_cli(
        capsys,
        "identities",
        "--algebra", "grassmann:deg=natural",
        "--sig", "0,1",
        "--out", str(p),
    )
    assert code == 0
    assert "certificate written" in out
    cert = json.loads(p.read_text())
    cfg = cert["config"]
    assert cfg["signature"] == [[0], [1]]
    assert cfg["method"] == "auto"
    assert cfg["algebra"]["kind"] == "grassmann"
    assert "generators" in cfg["algebra"]  # resolved truncation is echoed
    assert cfg["guard"] == {"max_cells": 8000000, "max_bits": 20000}


def test_out_path_unwritable_exits_1(capsys, tmp_path):
    code, _, err = run_cli(
        capsys,
        "regularity", "--group", "2", "--targets", "0,1",
        "--out", str(tmp_path / "missing-dir" / "c.json"),
    )
    assert code == 1
    assert "error" in err.lower()


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gradedpi", "relfree", "nf", "--mode", "infty", "--poly", "z2*z1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "-[x1,x2] + z1*z2" in proc.stdout
    proc = subprocess.run(
        [sys.executable, "-m", "gradedpi", "identities", "--algebra", "grassmann:deg=degk", "--sig", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 4
