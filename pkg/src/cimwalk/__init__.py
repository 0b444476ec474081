"""Greedy causal discovery as edge-walks over characteristic imset polytopes."""

__version__ = "0.1.0"

from .graphs import (Dag, GraphError, Mec, UndirectedGraph, consistent_extension,
                     essential_graph, mec_of, shd, skeleton)
from .imset import CharImset, full_imset, mec_restricted_imset, recover_mec
from .moves import (Move, MoveError, apply_move, enumerate_edge_moves,
                    enumerate_tree_moves, enumerate_turn_moves, verify_pair)
from .scoring import (LocalScoreCache, ScoringError, SufficientStats, local_bic,
                      score_dag, score_delta, score_mec)
from .ci_tests import CiDecision, CiTestError, fisher_z_test, pc_skeleton
from .search import (SearchConfig, SearchTrace, greedy_cim,
                     recurrent_phased_greedy_cim, skeletal_greedy_cim)
from .simulate import (SemModel, SimulationError, assign_weights, make_rng,
                       population_covariance, random_dag, sample)

__all__ = [
    "__version__",
    "Dag", "GraphError", "Mec", "UndirectedGraph", "consistent_extension",
    "essential_graph", "mec_of", "shd", "skeleton",
    "CharImset", "full_imset", "mec_restricted_imset", "recover_mec",
    "Move", "MoveError", "apply_move", "enumerate_edge_moves",
    "enumerate_tree_moves", "enumerate_turn_moves", "verify_pair",
    "LocalScoreCache", "ScoringError", "SufficientStats", "local_bic",
    "score_dag", "score_delta", "score_mec",
    "CiDecision", "CiTestError", "fisher_z_test", "pc_skeleton",
    "SearchConfig", "SearchTrace", "greedy_cim",
    "recurrent_phased_greedy_cim", "skeletal_greedy_cim",
    "SemModel", "SimulationError", "assign_weights", "make_rng",
    "population_covariance", "random_dag", "sample",
]
