"""What the SIC receiver actually does with each ladder.

Run: python demos/06_sic_decoding.py
"""
from noma_aoi import FixedProb, SystemParams, decode_sic, design_i_levels, design_ii_levels, enumerate_slot
from noma_aoi.oracle import enumerate_with_physical_rule

# %% Design I contains a collision: users on levels 1 and 2 survive a clash on level 3
d1 = design_i_levels(1, 4, 5).levels
print("Design I  ", d1, decode_sic([(0, d1[0]), (1, d1[1]), (2, d1[2]), (2, d1[2])], 1.0))

# %% With two Design II levels a collision takes down the whole slot
d2 = design_ii_levels(1, 2).levels
print("Design II ", d2, decode_sic([(0, d2[0]), (1, d2[1]), (1, d2[1])], 1.0))

# %% With three or more Design II levels the all-or-nothing picture is only
# approximate: a lone top-level user can still clear the threshold when the
# collision happens on a low, weak level.
d3 = design_ii_levels(1, 3).levels
print("Design II ", d3, decode_sic([(0, d3[0]), (2, d3[2]), (2, d3[2])], 1.0))

params = SystemParams(4, 3, power_budget=10.0, tx_policy=FixedProb(0.8))
rule = enumerate_slot(4, params, design_ii_levels(1, 3))
phys = enumerate_with_physical_rule(4, params, design_ii_levels(1, 3))
for i in rule:
    print(f"i={i}: all-or-nothing {rule[i][0]:.4f}   physical SIC {phys[i][0]:.4f}")
