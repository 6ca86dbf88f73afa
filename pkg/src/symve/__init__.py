"""Variable elimination with histogram-encoded local symmetries."""

from .errors import (
    AlreadyEliminated,
    CardinalityMismatch,
    InvalidConfig,
    MissingVariable,
    NotAPermutation,
    NotSymmetric,
    OutOfRange,
    ParseError,
    SymveError,
    TooLarge,
    UnknownVariable,
    ValidationError,
)
from .factors import DenseFactor, Variable, joint_oracle, multiply, project, sum_out
from .fgsym import ModelFile, format_model, load_model, parse_model, parse_uai
from .graph import CostLedger, EliminationStep, FactorGraph, eliminate, run_elimination, step_costs
from .search import anneal_order, exhaustive_optimal, find_order, greedy_order
from .symmetry import (
    CompactFactor,
    FactorStructure,
    compact_domain_size,
    compact_lookup,
    compact_multiply,
    compact_sum_out,
    decode,
    detect_symmetries,
    encode,
    hist_rank,
    hist_unrank,
    propagate_symmetries_schematic,
)

__version__ = "0.1.0"
