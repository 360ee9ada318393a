import json
import subprocess
import sys

import pytest

from epnlab.cli import build_parser, main, parse_couplings, parse_fixed, parse_ranges


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ep_find_json(capsys):
    code, out, _ = run(capsys, "ep-find", "--n", "4")
    assert code == 0
    rec = json.loads(out)
    assert list(rec) == sorted(rec) == ["couplings", "eliminant_text", "n", "residuals"]
    assert [round(v, 3) for v in rec["couplings"]] == [1.684, 0.406]


def test_ep_find_all_policy_lists(capsys):
    code, out, _ = run(capsys, "ep-find", "--n", "6", "--policy", "all")
    assert code == 0
    recs = json.loads(out)
    assert isinstance(recs, list) and len(recs) >= 2


def test_ep_find_tol_override(capsys):
    code, _, err = run(capsys, "ep-find", "--n", "4", "--tol", "1e-300")
    assert code == 1 and "EPNotFoundError" in err


def test_spectrum_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "--n", "3", "--couplings", "1.4142135", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "re,im" and len(lines) == 4
    # eight digits of sqrt(2) leave E = +-sqrt(2 - A^2) = +-4.2e-4, not a collapsed EP3
    a = 1.4142135
    ref = [-(2 - a * a) ** 0.5, 0.0, (2 - a * a) ** 0.5]
    got = [complex(*map(float, line.split(","))) for line in lines[1:]]
    assert [abs(g - r) for g, r in zip(got, ref)] == pytest.approx([0, 0, 0], abs=1e-8)
    code, out, _ = run(capsys, "spectrum", "--n", "3", "--couplings", "1.4142135623730951",
                       "--format", "csv")
    assert all(abs(complex(*map(float, l.split(",")))) < 1e-4 for l in out.splitlines()[1:])


def test_spectrum_tol_override(capsys):
    base = ["spectrum", "--n", "4", "--couplings", "1.683,0.406", "--format", "json"]
    _, out, _ = run(capsys, *base)
    assert json.loads(out)["classification"] == "complex"
    _, out, _ = run(capsys, *base, "--tol", "1e-2")
    assert json.loads(out)["classification"] == "real_degenerate"


def test_negative_couplings_accepted(capsys):
    code, out, _ = run(capsys, "spectrum", "--n", "4", "--couplings", "-0.5,0.2", "--format", "json")
    assert code == 0 and json.loads(out)["couplings"] == [-0.5, 0.2]


def test_usage_errors_exit_2(capsys):
    for argv in (["spectrum", "--n", "3", "--couplings", "1,2"],
                 ["spectrum", "--n", "3", "--couplings", "abc"],
                 ["ep-find", "--n", "1"],
                 ["ep-find", "--n", "4", "--bogus"],
                 ["verify"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2
    capsys.readouterr()


def test_domain_error_exit_1(capsys):
    code, _, err = run(capsys, "metric", "--n", "2", "--couplings", "1.5")
    assert code == 1 and "DegenerateSpectrumError" in err


def test_metric_outputs(capsys):
    code, out, _ = run(capsys, "metric", "--n", "3", "--t", "1.0", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "kind,row,col,re,im"
    eigs = sorted(float(l.split(",")[3]) for l in lines[1:] if l.startswith("eig"))
    assert eigs == pytest.approx([2, 4, 4], abs=1e-10)
    code, out, _ = run(capsys, "metric", "--family", "n3", "--a", "0.5", "--xi", "0", "--eta", "0",
                         "--format", "json")
    rec = json.loads(out)
    assert rec["positive_definite"] and len(rec["eigenvalues"]) == 3
    code, out, _ = run(capsys, "metric", "--n", "2", "--couplings", "0.5", "--format", "json")
    assert code == 0 and json.loads(out)["quasi_hermiticity_residual"] <= 1e-9


def test_jordan_text(capsys):
    code, out, _ = run(capsys, "jordan", "--n", "4")
    assert code == 0
    fields = dict(p for p in (line.split(None, 1) for line in out.splitlines()) if len(p) == 2)
    assert int(fields["ep_order"]) == 4
    assert float(fields["similarity_residual"]) <= 1e-6


def test_domain_scan_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"d{k}.csv"
        bpath = tmp_path / f"b{k}.dat"
        code, _, _ = run(capsys, "domain-scan", "--n", "4", "--range", "-2:2,-2:2", "--res", "30",
                         "--out", str(path), "--boundary", str(bpath), "--threads", str(1 + 3 * k))
        assert code == 0
        outs.append((path.read_bytes(), bpath.read_bytes()))
    assert outs[0] == outs[1]
    assert outs[0][0].startswith(b"A,B,class,min_gap,max_imag\n")


def test_domain_scan_needs_slice(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["domain-scan", "--n", "6", "--range", "-1:1,-1:1", "--res", "5",
              "--out", str(tmp_path / "x.csv")])
    assert info.value.code == 2
    code, _, _ = run(capsys, "domain-scan", "--n", "6", "--range", "-1:1,-1:1", "--fix", "C=0.26",
                     "--res", "5", "--out", str(tmp_path / "x.csv"))
    assert code == 0


def test_unwritable_output(capsys):
    code, _, err = run(capsys, "ep-find", "--n", "3", "--out", "/nonexistent/dir/x.json")
    assert code == 1 and "/nonexistent/dir/x.json" in err


def test_verify_single_and_scale(capsys):
    code, out, _ = run(capsys, "verify", "--check", "corridor")
    assert code == 0 and out.startswith("PASS corridor")
    code, out, _ = run(capsys, "verify", "--check", "metric", "--tol", "1e-12")
    assert code == 1 and out.startswith("FAIL metric")


def test_verify_all(capsys):
    code, out, _ = run(capsys, "verify", "--all")
    assert code == 0
    assert len([l for l in out.splitlines() if l.startswith("PASS")]) == 6


def test_repeated_runs_byte_identical(capsys):
    argv = ["spectrum", "--n", "5", "--couplings", "0.3,0.2", "--format", "json"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_parsers():
    assert parse_couplings("1, -2.5") == (1.0, -2.5)
    assert parse_ranges("-2:2,0:1") == [(-2.0, 2.0), (0.0, 1.0)]
    assert parse_fixed("C=0.26") == {2: 0.26}
    assert "domain-scan" in build_parser().format_help()


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "epnlab.cli", "ep-find", "--n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["couplings"] == [1.0]
