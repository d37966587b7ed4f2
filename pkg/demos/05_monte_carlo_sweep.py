"""A compact Monte Carlo sweep over SNR for three detectors.

Ten trials per grid point keeps this demo quick; the committed presets
(`fig6_sweep`, `fig8_targets`) run the full 100-trial protocol through the
command line:

    cfarlab montecarlo --preset fig6_sweep --out sweep.csv
"""

from cfarlab import McConfig, monte_carlo, table1_params

cfg = McConfig(
    trials=10,
    snr_grid=(-10.0, 0.0, 10.0),
    pfa_grid=(1e-3,),
    target_counts=(20,),
    base_seed=20260810,
    detectors=("ct", "ca", "ts"),
)
rows = monte_carlo(cfg, table1_params())

print("detector    SNR     P_d     P_d SE   empirical P_fa   precision   ms/frame")
for row in rows:
    print(
        f"{row['detector']:8s} {row['snr_db']:+5.0f}   {row['pd']:.3f}   {row['pd_se']:.4f}"
        f"   {row['pfa_emp']:.2e}         {row['pa']:.3f}      {row['runtime_ms_mean']:7.1f}"
    )

print("\nReading the table: the iterative detector holds its false-alarm rate near")
print("the design value across SNR while the others drift upward as target")
print("sidelobes strengthen, which is what drives the precision gap.")
