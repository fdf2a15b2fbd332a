"""
Optimistic processing
=====================

Processors that never wait: how much of their work survives, and how
rough does their horizon become?
"""

# %%
import numpy as np

from vthsim import ConservativeConfig, OptimisticConfig, record_times, scaling
from vthsim.ensemble import simulate_ensemble

t_max = 5000
ts = record_times(t_max)

# %%
cons, _ = simulate_ensemble(ConservativeConfig(1000, 1), 4, 0, t_max, ts)
opt, _ = simulate_ensemble(OptimisticConfig(1000), 4, 0, t_max, ts)
print(f"conservative efficiency {cons.mean['mean_height'][-1] / t_max:.3f}")
print(f"optimistic efficiency   {opt.mean['efficiency'][-1]:.3f}")

# %%
# The optimistic horizon is a sum of independent increments, so its width
# grows like sqrt(t) and never saturates.
fit = scaling.fit_power_law(opt.t, opt.mean["width_sq_optimistic"], (10, t_max))
print(f"optimistic width exponent {fit.exponent / 2:.3f}")
print("w2 optimistic / progress at the end:", np.round([opt.mean["width_sq_optimistic"][-1], opt.mean["width_sq_progress"][-1]], 2))
