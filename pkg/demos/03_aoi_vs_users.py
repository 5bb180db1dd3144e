"""Average AoI against the number of users at 0 dB and 30 dB (T=6, R=1, N=8, K=2).

NOMA uses the attempt probability min(K/M, 1); OMA uses 1/(M - j).
Run: python demos/03_aoi_vs_users.py [frames]
Writes aoi_vs_users.png next to this script when matplotlib is available.
"""
import sys
from pathlib import Path

from noma_aoi import (NOMA_EXACT, OMA, NomaAdaptive, OmaAdaptive, SystemParams, average_aoi, build_matrix,
                      db_to_linear, design_i_levels, design_ii_levels, simulate_frames)

frames = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
users = [5, 10, 15, 20, 25, 30]
curves = {}

# %%
for p_db in (0, 30):
    P = db_to_linear(p_db)
    print(f"\nP = {p_db} dB")
    print(f"{'M':>3} {'OMA':>9} {'DII':>9} {'DII sim':>15} {'DI sim':>15}")
    for M in users:
        noma = SystemParams(M, 2, 8, 6.0, 1.0, P, NomaAdaptive())
        oma = noma.replace(tx_policy=OmaAdaptive())
        a_oma = average_aoi(build_matrix(OMA, oma), 8, 6.0).average_aoi
        a_d2 = average_aoi(build_matrix(NOMA_EXACT, noma, design_ii_levels(1, 2)), 8, 6.0).average_aoi
        s_d2 = simulate_frames(noma, design_ii_levels(1, 2), "NOMA", frames, 1)
        s_d1 = simulate_frames(noma, design_i_levels(1, 2, M), "NOMA", frames, 1)
        curves.setdefault(p_db, []).append((a_oma, a_d2, s_d2.mean_aoi, s_d1.mean_aoi))
        print(f"{M:3d} {a_oma:9.1f} {a_d2:9.1f} {s_d2.mean_aoi:9.1f}+-{s_d2.stderr_aoi:4.1f}"
              f" {s_d1.mean_aoi:9.1f}+-{s_d1.stderr_aoi:4.1f}")

# %% Design II wins at 0 dB because its levels are affordable; at 30 dB
# everything is affordable and Design I's collision containment wins.
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for ax, (p_db, rows) in zip(axes, curves.items()):
    cols = list(zip(*rows))
    ax.plot(users, cols[0], "k-", label="OMA (analysis)")
    ax.plot(users, cols[1], "b-", label="NOMA Design II (analysis)")
    ax.plot(users, cols[2], "bo", label="NOMA Design II (sim)")
    ax.plot(users, cols[3], "r^--", label="NOMA Design I (sim)")
    ax.set_title(f"P = {p_db} dB")
    ax.set_xlabel("M")
    ax.set_ylabel("average AoI [s]")
    ax.grid(True)
axes[0].legend()
fig.tight_layout()
fig.savefig(Path(__file__).with_name("aoi_vs_users.png"), dpi=120)
