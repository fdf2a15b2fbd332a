"""
Utilization and speedup
=======================

Compare the simulated steady-state utilization with the closed forms, for
a few ring sizes and loads.
"""

# %%
import numpy as np

from vthsim import ConservativeConfig, theory
from vthsim.ensemble import simulate_ensemble

# %%
# Closed forms first.  Speedup only beats a single processor once the ring
# has more than seven members at unit load.
for L in (2, 3, 7, 8, 100, 1000):
    print(f"L={L:5d}  u={theory.utilization(L, 1):.5f}  s={theory.speedup(L, 1):8.2f}")

# %%
# Now the simulation: 200 runs of 1500 attempts, averaged over the second
# half.  Expect unit-load values a little below the formula.
t_max = 1500
for L, N in [(10, 1), (100, 1), (100, 10), (2, 8)]:
    ens, _ = simulate_ensemble(ConservativeConfig(L, N), 200, 0, t_max, np.arange(1, t_max + 1))
    u = ens.steady_mean("utilization", t_max // 2, t_max)
    v = ens.steady_mean("velocity", t_max // 2, t_max)
    print(f"L={L:4d} N={N:3d}  sim u={u:.4f}  theory u={theory.utilization(L, N):.4f}  velocity={v:.4f}")
