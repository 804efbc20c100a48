import json

import pytest

from fivequbit.cli import main, parse_amplitudes, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_default_passes(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert "overall: PASS" in out
    assert "entropy.1234|5" in out and "entropy.123|45" in out


def test_verify_json_reports_entropies(capsys):
    code, out, _ = run(capsys, "verify", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["passed"] is True
    assert data["schema_version"] == "1.0"
    assert data["entanglement"]["entropies"]["1234|5"] == pytest.approx(1.0, abs=1e-9)
    assert data["entanglement"]["entropies"]["123|45"] == pytest.approx(2.0, abs=1e-9)
    assert data["capacity"]["decomposition"] == "3 + 2 - 0 = 5"
    # round trip is stable
    assert json.dumps(json.loads(json.dumps(data))) == json.dumps(data)


def test_verify_unattainable_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "--tol", "1e-30", "--format", "json")
    data = json.loads(out)
    assert code == 1
    assert data["passed"] is False
    failed = [c for c in data["checks"] if not c["passed"]]
    assert failed and all(c["residual"] > 1e-30 for c in failed)


def test_verify_same_seed_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--seed", "11", "--format", "json", "--out", str(a)]) == 0
    assert main(["verify", "--seed", "11", "--format", "json", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_unwritable_output(capsys):
    code, _, err = run(capsys, "verify", "--out", "/nonexistent-dir/report.json")
    assert code == 2
    assert "cannot write" in err


def test_teleport_fixed_input(capsys):
    code, out, _ = run(capsys, "teleport", "--n", "1", "--amps", "0.6,0;0.8,0",
                       "--trials", "1", "--seed", "7", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["transcripts"][0]["fidelity"] == pytest.approx(1.0, abs=1e-9)


def test_teleport_two_random(capsys):
    code, out, _ = run(capsys, "teleport", "--n", "2", "--amps", "random", "--trials", "16",
                       "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert len(data["transcripts"]) == 16
    assert all(t["fidelity"] == pytest.approx(1.0, abs=1e-9) for t in data["transcripts"])
    assert sum(h["count"] for h in data["histogram"]) == 16
    assert all(h["exact_probability"] == pytest.approx(1 / 16, abs=1e-9) for h in data["histogram"])


def test_teleport_zero_vector(capsys):
    code, _, err = run(capsys, "teleport", "--n", "1", "--amps", "0,0;0,0")
    assert code == 2
    assert "zero vector" in err


def test_teleport_renormalizes_with_warning(capsys, caplog):
    code, out, _ = run(capsys, "teleport", "--n", "1", "--amps", "3;4", "--format", "json")
    assert code == 0
    assert "normalizing" in caplog.text
    amps = json.loads(out)["transcripts"][0]["input"]
    assert amps == [[pytest.approx(0.6), 0.0], [pytest.approx(0.8), 0.0]]


def test_teleport_wrong_amplitude_count(capsys):
    code, _, err = run(capsys, "teleport", "--n", "2", "--amps", "1,0;0,0")
    assert code == 2


def test_parse_amplitudes():
    assert list(parse_amplitudes("0.6,0;0,0.8")) == [0.6, 0.8j]
    for bad in ("a,b", "1,2,3", ";", "1,0;"):
        with pytest.raises(UsageError):
            parse_amplitudes(bad)


def test_sdc_capacity(capsys):
    code, out, _ = run(capsys, "sdc", "capacity")
    assert code == 0
    assert "3 + 2 - 0 = 5" in out


def test_sdc_capacity_json(capsys):
    _, out, _ = run(capsys, "sdc", "capacity", "--format", "json")
    cap = json.loads(out)["capacity"]
    assert (cap["log2_d_A"], cap["S_B"]) == (3.0, 2.0)
    assert cap["X"] == pytest.approx(5.0, abs=1e-9)


def test_sdc_roundtrip(capsys):
    code, out, _ = run(capsys, "sdc", "roundtrip")
    assert code == 0
    assert "32/32" in out


def test_sdc_encode_decode(capsys):
    assert run(capsys, "sdc", "encode", "--message", "1")[0] == 0
    code, out, _ = run(capsys, "sdc", "decode", "--message", "17", "--format", "json")
    assert code == 0 and json.loads(out)["decoded"] == 17


def test_sdc_message_range(capsys):
    code, _, err = run(capsys, "sdc", "encode", "--message", "40")
    assert code == 2
    assert "outside" in err
    assert run(capsys, "sdc", "encode")[0] == 2


def test_entropy_command(capsys):
    code, out, _ = run(capsys, "entropy", "--cut", "1234|5", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["cuts"][0]["entropy"] == pytest.approx(1.0, abs=1e-9)
    assert len(data["mixedness"]) == 31


def test_audit_tables_command(capsys):
    code, out, _ = run(capsys, "audit-tables", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["single_basis"]["flagged"] == 0
    assert data["two_qubit_basis"]["flagged"] == 3
    assert data["codewords"]["flagged"] == 10
    assert all(r["recovers"] for r in data["two_qubit_corrections"])


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["teleport", "--n", "3"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--tol", "-1"])
    assert exc.value.code == 2
