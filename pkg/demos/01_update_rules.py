"""
Update rules on a small ring
============================

Walk a six-processor ring through a few update attempts and watch which
processors are allowed to advance their local virtual time.
"""

# %%
import numpy as np

from vthsim import ConservativeConfig, new_flat
from vthsim.conservative import permission_mask

np.set_printoptions(precision=3, suppress=True)

# %%
# At unit load a processor advances only when it is not ahead of either
# neighbour.  From the flat start everybody is tied, so everybody moves.
state = new_flat(ConservativeConfig(L=6, N=1), seed=11)
for _ in range(6):
    out = state.step()
    print(f"t={state.t}  p={out.update_count}  h={state.heights}")

# %%
# The same check, done by hand on a staircase.  Only the bottom step may
# move; the top step is blocked by its wrap-around neighbour.
stairs = np.array([0.0, 1.0, 2.0, 3.0])
print(permission_mask(stairs, 1))

# %%
# With more load, most events are interior and need no neighbour at all.
# A blocked processor keeps the border site it picked until it succeeds.
state = new_flat(ConservativeConfig(L=6, N=4), seed=11)
for _ in range(6):
    out = state.step()
    print(f"t={state.t}  p={out.update_count}  sel={state.pending_selection}")
