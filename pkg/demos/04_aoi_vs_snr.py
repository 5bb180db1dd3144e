"""AoI against transmit SNR: Design II can get worse as P grows.

At low P some users cannot afford their level and stay silent, which thins
out collisions. Run: python demos/04_aoi_vs_snr.py
"""
from noma_aoi import (NOMA_EXACT, SystemParams, average_aoi, build_matrix, db_to_linear, design_ii_levels,
                      paired_difference, simulate_frames)

levels = design_ii_levels(1, 2)

# %% Closed form along P for M = 5 and 10
for M in (5, 10):
    row = []
    for p_db in range(0, 45, 5):
        params = SystemParams(M, 2, power_budget=db_to_linear(p_db))
        row.append(average_aoi(build_matrix(NOMA_EXACT, params, levels), 8, 6.0).average_aoi)
    print(f"M={M:2d} " + " ".join(f"{a:7.2f}" for a in row))

# %% The rise is small, so compare the two budgets on common random numbers
M = 10
hi = simulate_frames(SystemParams(M, 2, power_budget=db_to_linear(30)), levels, "NOMA", 100_000, 77)
lo = simulate_frames(SystemParams(M, 2, power_budget=db_to_linear(10)), levels, "NOMA", 100_000, 77)
d, se = paired_difference(hi, lo)
print(f"\nM={M}: AoI(30 dB) - AoI(10 dB) = {d:.2f} s, paired stderr {se:.2f} s")
