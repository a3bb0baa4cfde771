"""Chung-Lu random graphs with a Poisson transfer-matrix model and shifted inputs."""

from .distributions import (
    DegreeDistribution,
    WeightSequence,
    expand_to_weights,
    power_law_distribution,
    proportional_l1_error,
)
from .exact_inverse import PrecisionContext, ShiftResult, round_int, shift_input, vandermonde_inverse
from .feasibility import FeasibilityReport, diagnose
from .generator import Graph, Sampler, average_over_trials, degree_distribution_of
from .generator import generate_bernoulli, generate_edge_skipping
from .transfer import TransferMatrix, build_transfer_matrix, mean_action, predict_output

__all__ = [
    "DegreeDistribution", "WeightSequence", "expand_to_weights", "power_law_distribution",
    "proportional_l1_error", "PrecisionContext", "ShiftResult", "round_int", "shift_input",
    "vandermonde_inverse", "FeasibilityReport", "diagnose", "Graph", "Sampler",
    "average_over_trials", "degree_distribution_of", "generate_bernoulli", "generate_edge_skipping",
    "TransferMatrix", "build_transfer_matrix", "mean_action", "predict_output",
]
