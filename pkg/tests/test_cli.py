import json
import os

import pytest

from ssmusic.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main, parse_config
from ssmusic.errors import ConfigError


def test_command_required():
    with pytest.raises(ConfigError, match="command"):
        parse_config([])


def test_sweep_flags():
    cfg = parse_config("sweep --m 40 --K 30 --N 20 --algo ss_music --trials 200 --seed 7".split())
    assert cfg.command == "sweep"
    assert (cfg.m, cfg.K, cfg.N) == ((40,), (30,), (20,))
    assert cfg.algorithms == ("ss_music",) and cfg.trials == 200 and cfg.seed == 7
    assert cfg.n == 100 and cfg.t_max == 100 and cfg.epsilon == 1e-8


def test_grids_and_repeated_algos():
    cfg = parse_config(["sweep", "--m", "31:35:2,40", "--algo", "somp", "--algo", "ra_ormp,imusic"])
    assert cfg.m == (31, 33, 35, 40)
    assert cfg.algorithms == ("somp", "ra_ormp", "imusic")


def test_flag_overrides_file(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("# comment\ncommand = sweep\ntrials = 50\nm = 35\nsnr-db = 30\n")
    cfg = parse_config(["--config", str(f), "--trials", "10"])
    assert cfg.trials == 10 and cfg.m == (35,) and cfg.snr_db == (30.0,)


def test_unknown_key_reports_position(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("command = sweep\nbogus = 1\n")
    with pytest.raises(ConfigError, match=r"run.cfg:2: unknown key 'bogus'"):
        parse_config([], file=str(f))


@pytest.mark.parametrize("args", [
    ["sweep", "--trials", "0"],
    ["sweep", "--K", "100"],
    ["sweep", "--algo", "lasso"],
    ["sweep", "--trials", "many"],
    ["solve", "--m", "30,40"],
    ["sweep", "--unknown-flag"],
])
def test_invalid_values(args):
    with pytest.raises(ConfigError):
        parse_config(args)


def test_config_error_exit_code(capsys):
    assert main(["sweep", "--trials", "-1"]) == EXIT_CONFIG
    assert "trials" in capsys.readouterr().err


def test_solve_full_rank_instance(tmp_path, capsys):
    out = tmp_path / "o"
    code = main(["solve", "--m", "11", "--K", "10", "--N", "20", "--out", str(out), "--threads", "1"])
    assert code == EXIT_OK
    line = capsys.readouterr().out.strip()
    assert "success=true" in line and "iterations=1" in line


def test_sweep_outputs_and_determinism(tmp_path, capsys):
    args = ["sweep", "--m", "40", "--K", "30", "--N", "20", "--trials", "20", "--seed", "3",
            "--threads", "2", "--emit-svg"]
    assert main(args + ["--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(args + ["--out", str(tmp_path / "b")]) == EXIT_OK
    a = (tmp_path / "a" / "results.csv").read_bytes()
    assert a == (tmp_path / "b" / "results.csv").read_bytes()
    assert (tmp_path / "a" / "aggregate.json").read_bytes() == (tmp_path / "b" / "aggregate.json").read_bytes()
    lines = a.decode().splitlines()
    assert any(ln.startswith("# seed = 3") for ln in lines)
    assert len([ln for ln in lines if not ln.startswith("#")]) == 21
    doc = json.loads((tmp_path / "a" / "aggregate.json").read_text())
    assert doc["results"][0]["algorithms"]["ss_music"]["success_rate"] >= 0.99
    assert os.path.exists(tmp_path / "a" / "hist_ss_music.svg")


def test_phase_and_hist_commands(tmp_path):
    assert main(["phase", "--m", "5,12", "--K", "4,10", "--N", "20", "--n", "40", "--trials", "4",
                 "--out", str(tmp_path / "p"), "--emit-svg", "--threads", "1"]) == EXIT_OK
    assert (tmp_path / "p" / "phase_ss_music.svg").exists()
    assert main(["hist", "--m", "35", "--trials", "4", "--algo", "imusic",
                 "--out", str(tmp_path / "h"), "--emit-svg", "--threads", "1"]) == EXIT_OK
    assert (tmp_path / "h" / "hist_imusic.svg").exists()


def test_unwritable_output_dir(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["sweep", "--trials", "1", "--out", str(blocker / "sub")]) == EXIT_RUNTIME
