"""Entanglement distillation of Bell-diagonal states in the label picture.

Modules: ``bellcore`` (labels, distributions, label maps), ``trees`` and
``protocol`` (protocol trees, evaluator, reference protocols), ``search``
(exhaustive optimization), ``montecarlo`` (finite-copy checks),
``bootstrap`` (assisted-to-unassisted conversion) and ``cli``.
"""

from .bellcore import (
    BellLabel,
    BlockDist,
    LabelMap,
    LabelString,
    ParityMask,
    WernerParams,
    apply_label_map,
    bcnot,
    entropy,
    enumerate_label_maps,
    normalized_entropy,
    tensor,
    werner_dist,
)
from .protocol import (
    bell_measure,
    evaluate,
    hashing_yield,
    parity_split,
    rate_2copy,
    rate_asymptotic_recurrence,
    rate_recurrence_then_hash,
    recurrence_step,
)
from .bootstrap import effective_rate, make_plan, success_bound
from .montecarlo import residual_entropy_curve, simulate_parity_check
from .search import SearchConfig, canonicalize, optimize, werner_curve
from .trees import Discard, Hash, Measure, ParityCheck, Relabel

__version__ = "0.1.0"

__all__ = [
    "BellLabel", "BlockDist", "LabelMap", "LabelString", "ParityMask", "WernerParams",
    "apply_label_map", "bcnot", "entropy", "enumerate_label_maps", "normalized_entropy",
    "tensor", "werner_dist",
    "bell_measure", "evaluate", "hashing_yield", "parity_split", "rate_2copy",
    "rate_asymptotic_recurrence", "rate_recurrence_then_hash", "recurrence_step",
    "effective_rate", "make_plan", "success_bound",
    "residual_entropy_curve", "simulate_parity_check",
    "SearchConfig", "canonicalize", "optimize", "werner_curve",
    "Discard", "Hash", "Measure", "ParityCheck", "Relabel",
]
