"""Optimum-preserving variable ordering and linearization for QUBO problems."""

from .errors import LimitError, ParseError
from .linearize import LinearizationReport, extract_and_linearize, linearize, penalty_value
from .mkp import (
    DecodedSolution,
    MkpInstance,
    QuboEncoding,
    SlackBlock,
    decode,
    dp_knapsack_oracle,
    encode_linearized,
    encode_qubo,
    extract_mkp_order,
    generate_mkp,
    mkp_exact_oracle,
    optimality_gap,
    parse_orlib,
    serialize_orlib,
    slack_layout,
)
from .ordering import (
    OrderDag,
    extract_order_dense,
    extract_order_sparse,
    in_ordered_subspace,
    score_pair,
    verify_order,
)
from .qubo import QuboMatrix, energy, flip_delta, load_qubo, od_count, save_qubo, symmetric_coefficient
from .solver import (
    AnnealSchedule,
    SampleSet,
    brute_force,
    count_local_minima,
    default_schedule,
    simulated_anneal,
)
from .synth import SynthParams, generate_hard, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "AnnealSchedule",
    "DecodedSolution",
    "LimitError",
    "LinearizationReport",
    "MkpInstance",
    "OrderDag",
    "ParseError",
    "QuboEncoding",
    "QuboMatrix",
    "SampleSet",
    "SlackBlock",
    "SynthParams",
    "brute_force",
    "count_local_minima",
    "decode",
    "default_schedule",
    "dp_knapsack_oracle",
    "encode_linearized",
    "encode_qubo",
    "energy",
    "extract_and_linearize",
    "extract_mkp_order",
    "extract_order_dense",
    "extract_order_sparse",
    "flip_delta",
    "generate_hard",
    "generate_mkp",
    "generate_synthetic",
    "in_ordered_subspace",
    "linearize",
    "load_qubo",
    "mkp_exact_oracle",
    "od_count",
    "optimality_gap",
    "parse_orlib",
    "penalty_value",
    "save_qubo",
    "score_pair",
    "serialize_orlib",
    "simulated_anneal",
    "slack_layout",
    "symmetric_coefficient",
    "verify_order",
]
