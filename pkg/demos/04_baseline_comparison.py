"""Compare every detector on the same sidelobe-contaminated frame.

The sliding-window detectors flag each cell independently, so a strong
target's spectral leakage produces clusters of false cells around it.  The
iterative detector removes each target's footprint before looking again,
which is visible directly in the false-cell counts.

Calibrating the sliding-window scale factors takes a little while on first
run; they are cached afterwards.
"""

import time

from cfarlab import (
    DEFAULT_CALIBRATION_SEED,
    DetectorConfig,
    MatchConfig,
    WindowConfig,
    calibrate_scale,
    match_detections,
    metrics,
    nca,
    random_scenario,
    rd_transform,
    run_detector,
    synthesize_cube,
    table1_params,
)

params = table1_params()
p_fa = 1e-3
scenario = random_scenario(params, n_targets=20, snr_db=5.0, stationary_fraction_max=0.5, seed=8)
stack = rd_transform(synthesize_cube(scenario))
power_map = nca(stack)
det_cfg = DetectorConfig(p_fa=p_fa)
wcfg = WindowConfig()
cells = params.n * params.m

print(f"One frame, 20 targets at +5 dB SNR, design false-alarm probability {p_fa:g}")
print("calibrating sliding-window scale factors (cached after the first run) ...")
for kind in ("ca", "cago", "caso", "os", "tm"):
    scale = calibrate_scale(kind, wcfg, params.n_rx, p_fa, seed=DEFAULT_CALIBRATION_SEED)
    print(f"  {kind:5s} scale = {scale:.3f}")

print("\n  detector   detections   hits   false   P_d     P_fa      P_a     time")
for tag in ("ct", "ca", "cago", "caso", "os", "tm", "ts"):
    t0 = time.perf_counter()
    dets = run_detector(tag, stack, power_map, p_fa, det_cfg, wcfg)
    elapsed = time.perf_counter() - t0
    n_tp, n_fp, _ = match_detections(dets, scenario.targets, params, MatchConfig())
    rep = metrics(n_tp, n_fp, len(scenario.targets), cells)
    print(
        f"  {tag:8s}   {len(dets.detections):10d}   {n_tp:4d}   {n_fp:5d}   "
        f"{rep.pd:.3f}   {rep.pfa:.1e}   {rep.pa:.3f}   {elapsed * 1e3:6.0f} ms"
    )

print("\nExpected pattern: similar hit counts everywhere, but the sliding windows")
print("and the global-truncation variant accumulate sidelobe false cells that the")
print("footprint-subtracting loop never revisits.")
