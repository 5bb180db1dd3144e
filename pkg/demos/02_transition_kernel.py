"""The access-competition Markov chain and its brute-force check.

Run: python demos/02_transition_kernel.py
"""
import numpy as np

from noma_aoi import (NOMA_EXACT, NOMA_HIGH_SNR, OMA, FixedProb, SystemParams, build_matrix, db_to_linear,
                      design_ii_levels, enumerate_slot, oracle_matrix)

np.set_printoptions(precision=4, suppress=True)

# %% A toy: two users, two levels, attempt probability 1/2, all levels affordable.
# Row 0 is the state where nobody delivered yet; the last column is the tagged user's success.
params = SystemParams(2, 2, power_budget=1e300, tx_policy=FixedProb(0.5))
levels = design_ii_levels(1, 2)
model = build_matrix(NOMA_EXACT, params, levels)
print(np.hstack([model.transient, model.absorption[:, None]]))
print(enumerate_slot(2, params, levels))

# %% A realistic point: M=5, K=3 at 10 dB. The closed form and the exhaustive
# enumeration over (2K+1)^M outcomes agree to rounding.
params = SystemParams(5, 3, power_budget=db_to_linear(10), tx_policy=FixedProb(0.3))
levels = design_ii_levels(1, 3)
closed = build_matrix(NOMA_EXACT, params, levels)
brute = oracle_matrix(params, levels)
print("\nmax |closed form - enumeration| =", np.max(np.abs(closed.transient - brute.transient)))

# %% As P grows every level becomes affordable and the kernel approaches its
# high-SNR form; OMA only ever moves one step.
limit = build_matrix(NOMA_HIGH_SNR, params, levels)
for p_db in (0, 10, 20, 30, 40):
    m = build_matrix(NOMA_EXACT, params.replace(power_budget=db_to_linear(p_db)), levels)
    print(f"P={p_db:2d} dB  max gap to high-SNR kernel {np.max(np.abs(m.transient - limit.transient)):.2e}")
print("\nOMA kernel (M=5):\n", build_matrix(OMA, params).transient)
