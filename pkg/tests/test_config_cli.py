"""Run-configuration parsing and the command-line surface."""

import csv
import io
import sys

import numpy as np
import pytest

from cfarlab import ConfigurationError, load_preset, read_rdc1
from cfarlab.cli import main
from cfarlab.config import parse_config_text


def test_presets_load_and_carry_published_defaults():
    cfg = load_preset("table1")
    assert cfg.params.n == 256 and cfg.params.m == 128
    assert cfg.params.f_c == 77e9
    assert cfg.detector.p_fa == 1e-3
    assert cfg.detector.trunc.p_fa_internal == 1e-3
    assert cfg.detector.trunc.tol == 1e-5
    assert cfg.window.train_fast == 10 and cfg.window.train_slow == 6 and cfg.window.guard == 5
    assert cfg.window.os_rank is None and cfg.window.tm_trim == 3
    sweep = load_preset("fig6_sweep")
    assert len(sweep.montecarlo.snr_grid) == 7
    assert set(sweep.montecarlo.detectors) == {"ct", "ca", "cago", "caso", "os", "tm", "ts"}
    targets = load_preset("fig8_targets")
    assert len(targets.montecarlo.target_counts) == 8


def test_unknown_preset_rejected():
    with pytest.raises(ConfigurationError):
        load_preset("fig99")


def test_unknown_section_rejected():
    with pytest.raises(ConfigurationError):
        parse_config_text("[nonsense]\nx = 1\n")


def test_unknown_key_rejected():
    with pytest.raises(ConfigurationError):
        parse_config_text("[radar]\nwarp_factor = 9\n")


def test_bad_value_rejected():
    with pytest.raises(ConfigurationError):
        parse_config_text("[montecarlo]\ntrials = many\n")


def test_defaults_without_sections():
    cfg = parse_config_text("")
    assert cfg.params.n == 256
    assert cfg.montecarlo.trials == 100


def _write_cfg(tmp_path, body):
    path = tmp_path / "run.cfg"
    path.write_text(body)
    return str(path)


SINGLE_TARGET_CFG = """
[scenario]
n_targets = 1
snr_db = -15
stationary_fraction_max = 0

[detector]
p_fa = 1e-7

[montecarlo]
trials = 2
snr_grid = -15
pfa_grid = 1e-7
target_counts = 1
base_seed = 424242
detectors = ct, ts
"""


def test_cli_simulate_writes_cube_and_truth(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, SINGLE_TARGET_CFG)
    out = tmp_path / "frame.rdc1"
    rc = main(["simulate", "--config", cfg, "--seed", "11", "--out", str(out)])
    assert rc == 0
    cube = read_rdc1(out)
    assert cube.data.shape == (256, 128, 4)
    truth = capsys.readouterr().out.strip().splitlines()
    assert truth[0] == "range_m,velocity_mps,angle_rad,amplitude"
    assert len(truth) == 2


def test_cli_simulate_deterministic_bytes(tmp_path):
    cfg = _write_cfg(tmp_path, SINGLE_TARGET_CFG)
    a, b = tmp_path / "a.rdc1", tmp_path / "b.rdc1"
    assert main(["simulate", "--config", cfg, "--seed", "5", "--out", str(a)]) == 0
    assert main(["simulate", "--config", cfg, "--seed", "5", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_detect_single_strong_target_one_row(tmp_path):
    cfg = _write_cfg(tmp_path, SINGLE_TARGET_CFG)
    cube_path = tmp_path / "frame.rdc1"
    assert main(["simulate", "--config", cfg, "--seed", "11", "--out", str(cube_path)]) == 0
    det_path = tmp_path / "dets.csv"
    rc = main(["detect", str(cube_path), "--config", cfg, "--out", str(det_path)])
    assert rc == 0
    with open(det_path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["detector"] == "ct"
    noise_rows = list(csv.DictReader(open(tmp_path / "dets_noise.csv")))
    assert len(noise_rows) == 1
    assert noise_rows[0]["converged"] == "True"


def test_cli_detect_rerun_identical_csv(tmp_path):
    cfg = _write_cfg(tmp_path, SINGLE_TARGET_CFG)
    cube_path = tmp_path / "frame.rdc1"
    main(["simulate", "--config", cfg, "--seed", "11", "--out", str(cube_path)])
    p1, p2 = tmp_path / "d1.csv", tmp_path / "d2.csv"
    main(["detect", str(cube_path), "--config", cfg, "--out", str(p1)])
    main(["detect", str(cube_path), "--config", cfg, "--out", str(p2)])
    assert p1.read_bytes() == p2.read_bytes()


def test_cli_detect_zero_cube_degenerate_exit(tmp_path):
    from cfarlab import DataCube, table1_params, write_rdc1

    path = tmp_path / "zero.rdc1"
    p = table1_params()
    write_rdc1(DataCube(np.zeros((p.n, p.m, p.n_rx), dtype=complex), p), path)
    assert main(["detect", str(path)]) == 4


def test_cli_detect_parse_error_exit(tmp_path):
    path = tmp_path / "garbage.rdc1"
    path.write_bytes(b"not a cube")
    assert main(["detect", str(path)]) == 3


def test_cli_config_error_exit(tmp_path):
    bad = _write_cfg(tmp_path, "[radar]\nbogus = 1\n")
    assert main(["simulate", "--config", bad, "--out", str(tmp_path / "x.rdc1")]) == 2


def test_cli_montecarlo_grid_rows(tmp_path):
    body = """
[montecarlo]
trials = 1
snr_grid = 0, 5
pfa_grid = 1e-3
target_counts = 2
base_seed = 3
detectors = ts, ct, ca
"""
    # shrink the frame for speed
    body = "[radar]\nn = 64\nm = 32\nb = 0.853e9\nt_pri = 8e-6\n" + body
    cfg = _write_cfg(tmp_path, body)
    out = tmp_path / "mc.csv"
    assert main(["montecarlo", "--config", cfg, "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6
    assert list(rows[0].keys()) == [
        "detector",
        "snr_db",
        "p_fa",
        "n_targets",
        "trials",
        "pd",
        "pd_se",
        "pfa_emp",
        "pa",
        "runtime_ms_mean",
    ]


def test_cli_montecarlo_detector_override(tmp_path):
    body = "[radar]\nn = 64\nm = 32\nb = 0.853e9\nt_pri = 8e-6\n[montecarlo]\ntrials = 1\nsnr_grid = 0\npfa_grid = 1e-3\ntarget_counts = 1\nbase_seed = 3\ndetectors = ct, ts\n"
    cfg = _write_cfg(tmp_path, body)
    out = tmp_path / "mc.csv"
    assert main(["montecarlo", "--config", cfg, "--out", str(out), "--detector", "ts"]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert [r["detector"] for r in rows] == ["ts"]


def test_cli_noise_eval_outputs(tmp_path):
    body = "[radar]\nn = 64\nm = 32\nb = 0.853e9\nt_pri = 8e-6\n[scenario]\nn_targets = 3\n[montecarlo]\ntrials = 2\nsnr_grid = 0\n"
    cfg = _write_cfg(tmp_path, body)
    prefix = str(tmp_path / "ne")
    assert main(["noise-eval", "--config", cfg, "--seed", "2", "--out", prefix]) == 0
    with open(prefix + "_rmse.csv") as fh:
        rmse_rows = list(csv.DictReader(fh))
    assert len(rmse_rows) == 1
    assert float(rmse_rows[0]["rmse_shape"]) == 0.0
    with open(prefix + "_qq.csv") as fh:
        qq_rows = list(csv.DictReader(fh))
    assert len(qq_rows) == 100
