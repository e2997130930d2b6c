"""How fast does ILW approach Benjamin-Ono as the depth grows?

Solve both equations from the same smooth datum, measure the sup-in-time
H^s distance for a ladder of depths and fit a line in log-log coordinates.
Run from the repository root:  python3 demos/deep_water_limit.py
"""

from ilwlab.experiments import ExperimentConfig, run_deepwater

cfg = ExperimentConfig(
    experiment="deepwater",
    n_points=64,
    dt=1e-3,
    t_final=0.5,
    delta_list=[1, 2, 4, 8, 16, 32, 64],
    sobolev_s_list=[0.0, 0.5],
    threads=4,
)
report = run_deepwater(cfg)

print(f"{'delta':>6} {'s':>4} {'sup error':>12}")
for delta, s, err, _runtime in report.rows:
    print(f"{delta:6g} {s:4g} {err:12.4e}")

# the error should fall roughly like 1/delta
for s, fit in report.fits.items():
    print(f"s={s}: slope {fit.slope:.3f}, r^2 {fit.r_squared:.4f}")

# The renormalized equation is a different story: its symbol differs from BO
# only by an exponentially small amount, so the gap collapses much faster.
cfg.mode = "renormalized"
cfg.delta_list = [1, 2, 4, 8]
renorm = run_deepwater(cfg)
for delta, s, err, _ in renorm.rows:
    if s == 0.0:
        print(f"renormalized delta={delta:g}: {err:.3e}")
