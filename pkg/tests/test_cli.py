import json

import pytest

from nlwitness import cli
from nlwitness.errors import NumericalContractError
from nlwitness.linalg import matrix_to_json
from nlwitness.states import bell_state, mix_white

SMALL = ["--phase-grid", "0.785,2.356,3.927,5.498", "--n-mc", "10", "--no-tomography"]


def write_state(tmp_path, rho, name="state.json"):
    path = tmp_path / name
    path.write_text(json.dumps(matrix_to_json(rho)))
    return str(path)


def test_sweep_defaults_to_csv_on_stdout(capsys):
    assert cli.main(["sweep", "--mode", "anticorrelated", *SMALL]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0].startswith("phase,w_L_plus")
    assert len(lines) == 5


def test_sweep_writes_requested_files(tmp_path):
    argv = [
        "sweep", "--mode", "correlated", *SMALL,
        "--csv", str(tmp_path / "s.csv"),
        "--json", str(tmp_path / "s.json"),
        "--svg", str(tmp_path / "s.svg"),
    ]
    assert cli.main(argv) == 0
    doc = json.loads((tmp_path / "s.json").read_text())
    assert doc["config"]["mode"] == "correlated"
    assert (tmp_path / "s.csv").read_text().startswith("phase,")
    assert (tmp_path / "s.svg").read_text().startswith("<?xml")


def test_sweep_config_file_with_flag_override(tmp_path, capsys):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({
        "mode": "correlated",
        "purity_p": 0.5,
        "phase_grid": [0.785, 2.356],
        "n_mc": 10,
        "tomography": False,
    }))
    out_json = tmp_path / "out.json"
    assert cli.main([
        "sweep", "--config", str(config), "--purity-p", "0.8", "--json", str(out_json),
    ]) == 0
    doc = json.loads(out_json.read_text())
    assert doc["config"]["purity_p"] == 0.8
    assert len(doc["points"]) == 2


def test_sweep_error_exits(tmp_path, capsys):
    assert cli.main(["sweep", *SMALL]) == 2  # no mode anywhere
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["sweep", "--config", str(bad)]) == 2
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"mode": "correlated", "turbo": True}))
    assert cli.main(["sweep", "--config", str(unknown)]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep", "--mode", "sideways"])
    assert exc.value.code == 2


def test_contract_violation_exits_three(monkeypatch, capsys):
    def boom(config):
        raise NumericalContractError("synthetic failure")

    monkeypatch.setattr(cli, "run_sweep", boom)
    assert cli.main(["sweep", "--mode", "correlated", *SMALL]) == 3
    assert "synthetic failure" in capsys.readouterr().err


def test_witness_subcommand_frozen_values(tmp_path, capsys):
    state = write_state(tmp_path, mix_white(bell_state("Phi+"), 0.9))
    assert cli.main(["witness", "--state", state, "--label", "Phi+"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["w_1"] - (-0.425)) < 1e-12
    assert abs(doc["w_2"] - (-0.605625)) < 1e-12
    assert doc["w_inf"]["singular"] is False
    assert abs(doc["w_inf"]["value"] - (-4.0375)) < 1e-10
    assert doc["entangled"] is True
    assert doc["unitary_kind"] == "sigma_zz_neg"


def test_witness_subcommand_singular_output(tmp_path, capsys):
    state = write_state(tmp_path, mix_white(bell_state("Psi+"), 1.0))
    assert cli.main(["witness", "--state", state, "--label", "Psi+"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["w_inf"]["singular"] is True
    assert doc["w_inf"]["entangled"] is True
    assert abs(doc["w_inf"]["w_linear"] - (-0.5)) < 1e-12


def test_oracle_subcommand(tmp_path, capsys):
    state = write_state(tmp_path, mix_white(bell_state("Psi-"), 0.8))
    assert cli.main(["oracle", "--state", state]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["negativity"] - 0.35) < 1e-12
    assert doc["entangled"] is True


def test_state_file_problems_exit_two(tmp_path, capsys):
    assert cli.main(["witness", "--state", str(tmp_path / "nope.json"), "--label", "Phi+"]) == 2
    garbled = tmp_path / "garbled.json"
    garbled.write_text("[1, 2, 3]")
    assert cli.main(["oracle", "--state", str(garbled)]) == 2
    not_density = write_state(tmp_path, 2.0 * mix_white(bell_state("Phi+"), 0.5), "trace2.json")
    assert cli.main(["oracle", "--state", not_density]) == 2


def test_demo_writes_everything(tmp_path, capsys):
    out_dir = tmp_path / "report"
    assert cli.main([
        "demo", "--out-dir", str(out_dir), "--flux", "1000", "--n-mc", "10",
    ]) == 0
    for mode in ("correlated", "anticorrelated"):
        for ext in ("csv", "json", "svg"):
            assert (out_dir / f"{mode}.{ext}").exists()
    out = capsys.readouterr().out
    assert "[correlated]" in out and "[anticorrelated]" in out
    assert "8 analysis settings" in out and "10 distinct" in out
