"""Receive-SNR ladders for the two designs and what they cost a user.

Run: python demos/01_snr_ladders.py
"""
import numpy as np

from noma_aoi import db_to_linear, design_i_levels, design_ii_levels, feasibility_probs

# %% The two ladders side by side, for the three (R, M) columns of interest
for R, M in [(1, 5), (1, 10), (2, 5)]:
    d1 = design_i_levels(R, 4, M)
    d2 = design_ii_levels(R, 4)
    print(f"R={R} M={M}:  Design I {[int(x) for x in d1]}   Design II {[int(x) for x in d2]}")

# %% Design I is sized for the worst case (all other users on the next level
# down), so it grows with M. Design II only grows with K.
print()
for M in (2, 5, 10, 20, 50):
    print(f"M={M:3d}  top Design I level = {design_i_levels(1, 4, M).levels[0]:10.0f}")

# %% How often a Rayleigh user cannot afford each level, at 0 dB and 30 dB
print()
for p_db in (0, 30):
    P = db_to_linear(p_db)
    pe1 = feasibility_probs(design_i_levels(1, 2, 10), P)
    pe2 = feasibility_probs(design_ii_levels(1, 2), P)
    print(f"P={p_db:2d} dB  infeasible  Design I {np.round(pe1, 4)}   Design II {np.round(pe2, 4)}")
