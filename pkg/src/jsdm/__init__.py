"""Two-stage beamforming simulation for FDD massive MIMO downlink.

Covariance-based user clustering (DOL similarity + correlation
clustering), dual outer-precoder designs, deterministic-equivalent SINR
evaluation with a Monte-Carlo oracle, graph-based user scheduling, and an
executable desk-scale verifier of the SAT-to-scheduling reduction.
"""

from .channel import AntennaArray, CovarianceMatrix, UserProfile, one_ring_covariance
from .clustering import AdviceGraph, Clustering, cluster_users
from .errors import (ConfigError, ContractViolation, JsdmError, NumericalError,
                     SizeCapError)
from .harness import ScenarioConfig, run_scenario
from .precoding import (GroupCentroid, approx_bd_precoders, group_centroid,
                        inclusion_factor, matched_precoders, zf_inner)
from .scheduling import GroupSystem, ScheduleSet, jain_index
from .similarity import chordal_distance, dol, similarity_matrix
from .sinr import deterministic_sinr, monte_carlo_sinr, solve_fixed_point

__version__ = "0.1.0"

__all__ = [
    "AntennaArray", "CovarianceMatrix", "UserProfile", "one_ring_covariance",
    "AdviceGraph", "Clustering", "cluster_users",
    "ConfigError", "ContractViolation", "JsdmError", "NumericalError",
    "SizeCapError",
    "ScenarioConfig", "run_scenario",
    "GroupCentroid", "approx_bd_precoders", "group_centroid",
    "inclusion_factor", "matched_precoders", "zf_inner",
    "GroupSystem", "ScheduleSet", "jain_index",
    "chordal_distance", "dol", "similarity_matrix",
    "deterministic_sinr", "monte_carlo_sinr", "solve_fixed_point",
    "__version__",
]
