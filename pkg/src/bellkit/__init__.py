"""Quantum Hilbert-space models of bipartite Bell scenarios."""

from .hilbert import Density4, mixture_density, pure_density, tensor_operator, tensor_state, validate_density
from .lhv import lhv_feasible, fine_chsh_all, strategy_tables
from .measurement import Spectral4, expectation, lueders_nonselective, make_measurement, outcome_probabilities
from .refmodels import build_reference, expected_report
from .scenario import (
    AnalysisReport,
    JointTables,
    QuantumModel,
    analyze_model,
    analyze_tables,
    bell_operator,
    born_tables_batch,
    chsh_delta,
    chsh_max_sym,
    chsh_variants_batch,
    classify,
    marginal_deviation,
    scenario_probabilities,
)
from .schmidt import is_product_measurement, is_product_state, measurement_kind, schmidt_decompose
from .synthesis import SynthesisRequest, basis_matching_probabilities, synthesize_model

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "Density4",
    "JointTables",
    "QuantumModel",
    "Spectral4",
    "SynthesisRequest",
    "analyze_model",
    "analyze_tables",
    "basis_matching_probabilities",
    "bell_operator",
    "born_tables_batch",
    "build_reference",
    "chsh_delta",
    "chsh_max_sym",
    "chsh_variants_batch",
    "classify",
    "expectation",
    "expected_report",
    "fine_chsh_all",
    "is_product_measurement",
    "is_product_state",
    "lhv_feasible",
    "lueders_nonselective",
    "make_measurement",
    "marginal_deviation",
    "measurement_kind",
    "mixture_density",
    "outcome_probabilities",
    "pure_density",
    "scenario_probabilities",
    "schmidt_decompose",
    "strategy_tables",
    "synthesize_model",
    "tensor_operator",
    "tensor_state",
    "validate_density",
]
