"""
Roughening of the horizon
=========================

Grow the horizon on rings of several sizes, measure how its width grows
and saturates, and collapse the curves.
"""

# %%
from vthsim import ConservativeConfig, record_times, scaling
from vthsim.ensemble import simulate_ensemble

# %%
curves = []
for L in (16, 32, 64):
    t_max = int(40 * L**1.5)
    ts = record_times(t_max, max_gap=max(1, t_max // 1000))
    ens, _ = simulate_ensemble(ConservativeConfig(L, 1), 60, 1, t_max, ts)
    t_x, w2_sat = scaling.detect_saturation(ens.t, ens.mean["width_sq"])
    print(f"L={L:3d}  crossover t_x={t_x:7.0f}  plateau w2={w2_sat:.3f}")
    curves.append(scaling.Curve(ens.t, ens.mean["width_sq"], L))

# %%
# Growth is cleaner on a ring far from saturation.
big, _ = simulate_ensemble(ConservativeConfig(2048, 1), 20, 2, 4000, record_times(4000))
fit = scaling.fit_power_law(big.t, big.mean["width_sq"], (100, 4000))
print(f"growth exponent beta ~ {fit.exponent / 2:.3f} (L=2048)")

# %%
# Rescale time by L**z and width by L**(2 alpha).  Compare the spread of the
# rescaled curves for two exponent choices.
for alpha, z in [(0.5, 1.5), (1.0, 1.0)]:
    r = scaling.collapse_residual(curves, alpha, z, t_min=10)
    print(f"alpha={alpha} z={z}  residual={r:.3f}")
