"""Fixed attempt probability 0.05 against the adaptive choices.

Run: python demos/05_attempt_probability.py
"""
from noma_aoi import (NOMA_EXACT, OMA, FixedProb, NomaAdaptive, OmaAdaptive, SystemParams, average_aoi,
                      build_matrix, db_to_linear, design_ii_levels)

levels = design_ii_levels(1, 2)


def aoi(strategy, params):
    return average_aoi(build_matrix(strategy, params, levels), 8, 6.0).average_aoi


# %%
for p_db in (0, 30):
    print(f"\nP = {p_db} dB")
    print(f"{'M':>3} {'OMA fixed':>10} {'NOMA fixed':>11} {'OMA adapt':>10} {'NOMA adapt':>11}")
    for M in (2, 5, 10, 20, 30):
        base = SystemParams(M, 2, power_budget=db_to_linear(p_db))
        fixed = base.replace(tx_policy=FixedProb(0.05))
        print(f"{M:3d} {aoi(OMA, fixed):10.1f} {aoi(NOMA_EXACT, fixed):11.1f}"
              f" {aoi(OMA, base.replace(tx_policy=OmaAdaptive())):10.1f}"
              f" {aoi(NOMA_EXACT, base.replace(tx_policy=NomaAdaptive())):11.1f}")
