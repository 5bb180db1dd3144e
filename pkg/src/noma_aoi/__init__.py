"""Grant-free NOMA random access with pre-configured receive-SNR levels.

Analytical transition kernels, closed-form average AoI, a brute-force
enumeration oracle and a slot-level Monte Carlo simulator.
"""

from .aoi import AbsorptionImpossible, AoiBreakdown, average_aoi, frame_success_prob, interupdate_moments, service_moments
from .kernel import (NOMA_EXACT, NOMA_HIGH_SNR, OMA, TransitionModel, bar_transition, build_matrix,
                     elementary_symmetric, gamma_fail, high_snr_transition, oma_transition, transition)
from .levels import LevelSet, design_i_levels, design_ii_levels, feasibility_probs, sic_threshold
from .oracle import (InstanceTooLarge, distinct_levels_success, enumerate_slot, enumerate_with_physical_rule,
                     oracle_matrix, physical_success)
from .params import FixedProb, NomaAdaptive, OmaAdaptive, SystemParams, db_to_linear, parse_policy
from .sim import NoDeliveryObserved, SimEstimate, decode_sic, estimate_transitions, paired_difference, simulate_frames

__version__ = "0.1.0"
