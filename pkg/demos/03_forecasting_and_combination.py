"""Multi-step forecasting, loss metrics, and equal-weight combination.

Produces 8-step (two hours at quarter-hourly resolution) forecast paths
from several models at one origin, scores them with the multivariate
MAE/MSE, and runs the Diebold-Mariano comparison between a combined
forecaster and its components over many origins.
"""

from windvecm import (
    DeterministicSpec,
    cointegrated_spec,
    combine_equal,
    dm_test,
    fit_vecm,
    forecast_vecm,
    generate,
    mae,
    mse,
    per_origin_loss,
    sample_origins,
)

CONST = DeterministicSpec.CONSTANT
H = 8

panel = generate(cointegrated_spec(d=4, r_true=2, n_obs=3000, seed=3))

# ---------------------------------------------------------------------------
# One origin, three forecasters: persistence, low-rank VECM, full-rank VAR
# ---------------------------------------------------------------------------
origin = 2500
window = panel.window(origin - 383, origin + 1)          # T = 384
actual = panel.values[origin + 1 : origin + 1 + H]

persistence = forecast_vecm(
    fit_vecm(window, p=1, r=0, det=DeterministicSpec.NONE), window, H,
    origin_index=origin,
)
low_rank = forecast_vecm(fit_vecm(window, p=2, r=2, det=CONST), window, H,
                         origin_index=origin)
full_rank = forecast_vecm(fit_vecm(window, p=2, r=4, det=CONST), window, H,
                          origin_index=origin)

for name, path in (("persistence", persistence), ("rank-2 VECM", low_rank),
                   ("full-rank VAR", full_rank)):
    err = [actual - path.values]
    print(f"{name:14s} MAE {mae(err):7.3f}   MSE {mse(err):8.3f}")

combo = combine_equal([low_rank, full_rank])
print(f"{'combination':14s} MAE {mae([actual - combo.values]):7.3f}   "
      f"MSE {mse([actual - combo.values]):8.3f}")

# ---------------------------------------------------------------------------
# Over many origins: is the combination significantly better than its parts?
# One aggregated loss per origin feeds the DM test.
# ---------------------------------------------------------------------------
T = 384
origins = sample_origins(panel.n_obs, T, H, 150, seed=11)
errs = {"low": [], "full": [], "combo": []}
for o in origins:
    win = panel.window(o - T + 1, o + 1)
    act = panel.values[o + 1 : o + 1 + H]
    a = forecast_vecm(fit_vecm(win, 2, 2, CONST), win, H, origin_index=int(o))
    b = forecast_vecm(fit_vecm(win, 2, 4, CONST), win, H, origin_index=int(o))
    c = combine_equal([a, b])
    errs["low"].append(act - a.values)
    errs["full"].append(act - b.values)
    errs["combo"].append(act - c.values)

print(f"\nover {origins.size} origins at T={T}:")
for name in ("low", "full", "combo"):
    print(f"  {name:6s} MAE {mae(errs[name]):.4f}")

combo_losses = per_origin_loss(errs["combo"], "absolute")
for name in ("low", "full"):
    other = per_origin_loss(errs[name], "absolute")
    result = dm_test(combo_losses, other)
    print(f"  DM combo vs {name:5s}: statistic {result.statistic:+.3f}, "
          f"p-value {result.p_value:.4f}")
