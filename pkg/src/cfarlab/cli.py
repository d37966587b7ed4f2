"""Command-line front end: simulation, detection, sweeps and noise evaluation.

Subcommands
-----------
``simulate``    write an RDC1 cube for a random scene and print the truth table
``detect``      run one detector on a cube file and emit detection CSV
``montecarlo``  run the configured sweep and emit metrics CSV
``noise-eval``  per-SNR estimation RMSE plus a quantile-pair CSV

Exit codes: 0 success, 2 configuration error, 3 cube parse error,
4 degenerate input, 5 numerical failure.
"""

import argparse
import csv
import sys

from .config import RunConfig, available_presets, load_config, load_preset
from .cubeio import read_rdc1, write_rdc1
from .errors import CfarLabError, ConfigurationError
from .evaluation import (
    DETECTOR_TAGS,
    match_detections,
    monte_carlo,
    noise_rmse,
    qq_data,
    run_detector,
)
from .noise import estimate_noise
from .sim import random_scenario, synthesize_cube
from .spectrum import nca, rd_transform

MC_COLUMNS = (
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
)

DETECTION_COLUMNS = (
    "detector",
    "r_ind",
    "v_ind",
    "r_hat",
    "v_hat",
    "range_m",
    "velocity_mps",
    "power",
    "iteration",
)


def _resolve_config(args):
    if args.config and args.preset:
        raise ConfigurationError("pass either --config or --preset, not both")
    if args.config:
        return load_config(args.config)
    if args.preset:
        return load_preset(args.preset)
    return RunConfig()


def _open_out(path):
    return open(path, "w", newline="", encoding="utf-8") if path else sys.stdout


def _write_rows(path, columns, rows):
    fh = _open_out(path)
    try:
        writer = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_simulate(args):
    cfg = _resolve_config(args)
    seed = args.seed if args.seed is not None else cfg.montecarlo.base_seed
    scen = random_scenario(
        cfg.params,
        cfg.scenario.n_targets,
        cfg.scenario.snr_db,
        cfg.scenario.stationary_fraction_max,
        seed,
    )
    cube = synthesize_cube(scen)
    out = args.out or "cube.rdc1"
    write_rdc1(cube, out)

    writer = csv.writer(sys.stdout)
    writer.writerow(["range_m", "velocity_mps", "angle_rad", "amplitude"])
    for tgt in scen.targets:
        writer.writerow([tgt.range_m, tgt.velocity_mps, tgt.angle_rad, tgt.amplitude])
    print(f"wrote {out}", file=sys.stderr)
    return 0


def cmd_detect(args):
    cfg = _resolve_config(args)
    cube = read_rdc1(args.cube)
    stack = rd_transform(cube)
    power_map = nca(stack)
    tag = args.detector or "ct"
    dets = run_detector(tag, stack, power_map, cfg.detector.p_fa, cfg.detector, cfg.window)

    rows = [
        {
            "detector": tag,
            "r_ind": d.peak.r_ind,
            "v_ind": d.peak.v_ind,
            "r_hat": d.peak.r_hat,
            "v_hat": d.peak.v_hat,
            "range_m": d.peak.range_m,
            "velocity_mps": d.peak.velocity_mps,
            "power": d.power,
            "iteration": d.iteration,
        }
        for d in dets.detections
    ]
    _write_rows(args.out, DETECTION_COLUMNS, rows)

    model = dets.noise_model
    if args.out and model is not None:
        sidecar = f"{args.out.removesuffix('.csv')}_noise.csv"
        _write_rows(
            sidecar,
            ("shape", "mu_z", "theta", "trunc_threshold", "iterations", "converged"),
            [
                {
                    "shape": model.shape,
                    "mu_z": model.mu_z,
                    "theta": model.theta,
                    "trunc_threshold": model.trunc_threshold,
                    "iterations": model.iterations,
                    "converged": model.converged,
                }
            ],
        )
    return 0


def cmd_montecarlo(args):
    cfg = _resolve_config(args)
    mc = cfg.montecarlo
    if args.seed is not None:
        mc = type(mc)(
            trials=mc.trials,
            snr_grid=mc.snr_grid,
            pfa_grid=mc.pfa_grid,
            target_counts=mc.target_counts,
            base_seed=args.seed,
            detectors=mc.detectors,
        )
    if args.detector:
        mc = type(mc)(
            trials=mc.trials,
            snr_grid=mc.snr_grid,
            pfa_grid=mc.pfa_grid,
            target_counts=mc.target_counts,
            base_seed=mc.base_seed,
            detectors=(args.detector,),
        )
    rows = monte_carlo(mc, cfg.params, cfg.detector, cfg.window, cfg.match)
    _write_rows(args.out, MC_COLUMNS, rows)
    return 0


def cmd_noise_eval(args):
    cfg = _resolve_config(args)
    seed = args.seed if args.seed is not None else cfg.montecarlo.base_seed
    prefix = args.out or "noise_eval"
    reports = noise_rmse(
        cfg.params,
        cfg.montecarlo.snr_grid,
        trials=cfg.montecarlo.trials,
        seed=seed,
        n_targets=cfg.scenario.n_targets,
        trunc=cfg.detector.trunc,
        stationary_fraction_max=cfg.scenario.stationary_fraction_max,
    )
    _write_rows(
        f"{prefix}_rmse.csv",
        ("snr_db", "rmse_shape", "rmse_scale", "rmse_mean", "rmse_var"),
        [vars(r) for r in reports],
    )

    # Quantile pairs for one representative frame at the first SNR point.
    scen = random_scenario(
        cfg.params,
        cfg.scenario.n_targets,
        cfg.montecarlo.snr_grid[0],
        cfg.scenario.stationary_fraction_max,
        seed,
    )
    power_map = nca(rd_transform(synthesize_cube(scen)))
    model = estimate_noise(power_map, cfg.params.n_rx, cfg.detector.trunc)
    kept = power_map[power_map <= model.trunc_threshold]
    pairs = qq_data(kept, model, n_points=100)
    _write_rows(
        f"{prefix}_qq.csv",
        ("theoretical_quantile", "empirical_quantile"),
        [{"theoretical_quantile": t, "empirical_quantile": e} for t, e in pairs],
    )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cfarlab",
        description="FMCW radar target-detection laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="path to a .cfg run configuration")
        p.add_argument(
            "--preset",
            help=f"named preset ({', '.join(available_presets())})",
        )
        p.add_argument("--seed", type=int, help="override the configured base seed")
        p.add_argument("--out", help="output path")
        p.add_argument(
            "--detector",
            choices=DETECTOR_TAGS,
            help="detector tag (detect/montecarlo)",
        )

    p_sim = sub.add_parser("simulate", help="write an RDC1 cube and truth CSV")
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_det = sub.add_parser("detect", help="run one detector on a cube file")
    p_det.add_argument("cube", help="RDC1 cube path")
    add_common(p_det)
    p_det.set_defaults(func=cmd_detect)

    p_mc = sub.add_parser("montecarlo", help="run the configured sweep")
    add_common(p_mc)
    p_mc.set_defaults(func=cmd_montecarlo)

    p_ne = sub.add_parser("noise-eval", help="noise-estimation RMSE and Q-Q CSVs")
    add_common(p_ne)
    p_ne.set_defaults(func=cmd_noise_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CfarLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", 1)


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
