"""Neighborhood message passing for cascade dynamics on loopy networks."""

from .engine import (EngineConfig, MarginalHistory, NmpSystem, classical_mp,
                     run_nmp, seed_vector, steady_state)
from .errors import ConfigError, EdgeListError, LoopcastError, UsageError
from .graph import (Network, NodeSet, coreness, diameter, karate_club,
                    load_edge_list)
from .interventions import (InterventionSpec, QualityReport, error_eps,
                            kendall_tau, mc_quality, nmp_quality)
from .neighborhoods import build_all_neighborhoods, build_neighborhood
from .oracle import exact_enumerate, mc_estimate, simulate_cascade

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "EdgeListError", "EngineConfig", "InterventionSpec",
    "LoopcastError", "MarginalHistory", "Network", "NmpSystem", "NodeSet",
    "QualityReport", "UsageError", "build_all_neighborhoods",
    "build_neighborhood", "classical_mp", "coreness", "diameter", "error_eps",
    "exact_enumerate", "karate_club", "kendall_tau", "load_edge_list",
    "mc_estimate", "mc_quality", "nmp_quality", "run_nmp", "seed_vector",
    "simulate_cascade", "steady_state",
]
