import json
import subprocess
import sys

import pytest

from conftest import FIXTURES, GOLDEN
from primegeo import cli
from primegeo.lmfdbclient import LMFDBClient, LocalRow

P11 = ["--signature", "1", "1", "--primes", "2", "3", "--convention", "multiplicative"]
P30 = ["--signature", "3", "0", "--primes", "2", "3", "--convention", "multiplicative"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "argv,golden",
    [
        (["theta-sweep", *P11, "--grid", "10", "--grid", "100", "--grid", "1000"], "theta_sweep_11.csv"),
        (["theta-sweep", *P11, "--grid", "10", "--grid", "100", "--grid", "1000", "--format", "json"], "theta_sweep_11.json"),
        (["enumerate", *P11, "--thresholds", "100"], "enumerate_11.csv"),
        (["enumerate", *P30, "--thresholds", "20,20"], "enumerate_30.csv"),
    ],
)
def test_golden_outputs(capsys, argv, golden):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text()


def test_output_file_and_config_file(tmp_path, capsys):
    conf = tmp_path / "run.json"
    conf.write_text(json.dumps({"signature": [1, 1], "S": [2, 3], "convention": "multiplicative", "grid": [[10], [100], [1000]]}))
    out = tmp_path / "rows.csv"
    code, stdout, err = run(capsys, "theta-sweep", "--config", str(conf), "-o", str(out))
    assert code == 0 and stdout == ""
    assert out.read_text() == (GOLDEN / "theta_sweep_11.csv").read_text()
    assert "acceptance-grade" in err


def test_unknown_config_key(tmp_path, capsys):
    conf = tmp_path / "run.json"
    conf.write_text(json.dumps({"signature": [1, 1], "colour": "red"}))
    code, _, err = run(capsys, "theta-sweep", "--config", str(conf), "--convention", "linear", "--thresholds", "5")
    assert code == 1 and "colour" in err


def test_missing_convention(capsys):
    code, out, err = run(capsys, "theta-sweep", "--signature", "1", "1", "--thresholds", "100")
    assert code == 1 and out == "" and "convention" in err


def test_bad_signature(capsys):
    code, _, _ = run(capsys, "enumerate", "--signature", "2", "1", "--convention", "linear", "--thresholds", "5")
    assert code == 1


def test_empty_result_is_header_only(capsys):
    code, out, _ = run(capsys, "enumerate", *P11, "--thresholds", "1.5")
    assert code == 0 and out == "charpoly,disc,alpha,multiplicity\n"


def test_single_box_sweep(capsys):
    code, out, _ = run(capsys, "theta-sweep", *P11, "--thresholds", "100")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 2
    row = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert float(row["target"]) == pytest.approx(2.0)
    assert float(row["skipped_mass"]) == 0


def test_psi_command(capsys):
    code, out, _ = run(capsys, "psi", *P11, "--grid", "100", "--grid", "1000")
    assert code == 0
    assert out.splitlines()[0] == "T_1,psi,ratio"
    vals = [float(x.split(",")[1]) for x in out.splitlines()[1:]]
    assert vals == sorted(vals) and vals[0] > 0


def test_dirichlet_refuses_outside_convergence(capsys):
    code, out, err = run(capsys, "dirichlet", *P11, "--thresholds", "100", "--s", "1.0")
    assert code == 1 and out == "" and "Re(s_k) > 1" in err


def test_dirichlet_runs(capsys):
    code, out, _ = run(capsys, "dirichlet", *P11, "--thresholds", "1000", "--s", "1.5", "--j", "0", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "s_1,j,partial,leading,rescaled" and len(lines) == 3


def test_crosscheck_with_fixtures(capsys):
    code, out, _ = run(capsys, "crosscheck", *P11, "--thresholds", "30", "--fixtures", str(FIXTURES / "fieldfacts.json"), "--offline")
    report = json.loads(out)
    assert code == 0 and report["checked"] > 0 and report["discrepancies"] == []


def test_crosscheck_injected_fault(capsys):
    fixtures = str(FIXTURES / "fieldfacts.json")
    fact = LMFDBClient(fixtures, offline=True).fetch_field(-23)
    cfg = cli.RunConfig.from_mapping({"signature": [1, 1], "convention": "multiplicative", "thresholds": [30],
                                      "fixtures": fixtures, "offline": True})
    assert cli.cmd_crosscheck(cfg, [LocalRow(-23, 1, fact.R + 1e-4)]) == 1
    report = json.loads(capsys.readouterr().out)
    assert len(report["discrepancies"]) == 1


def test_crosscheck_offline_without_fixtures(tmp_path, capsys):
    code, _, err = run(capsys, "crosscheck", *P11, "--thresholds", "30", "--fixtures", str(tmp_path / "none.json"), "--offline")
    assert code == 2 and "offline" in err


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "primegeo", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for name in ("enumerate", "theta-sweep", "dirichlet", "psi", "crosscheck"):
        assert name in res.stdout
