"""Deterministic median and mediocre-element protocols on a metered blackboard."""
from .approx2 import ConstParams, approx_med2, build_quantiles, pad_to_3n
from .approxk import ApproxParams, approx_medk
from .channel import Board, CostModel, Kind, Message, ProtocolOutcome, Transcript, replay
from .core import (
    AlphaRatio,
    InvariantViolation,
    MediocreSpec,
    MultisetSeq,
    ProtocolError,
    RankInfo,
    Universe,
    is_mediocre,
    oracle_median,
    oracle_rank,
    pad_preserving_median,
    pred_succ,
    prefix_bits,
    reduce_selection_to_median,
)
from .exact2 import median2_count, median2_halving, median2_interval
from .exactk import PrunePoset, Role, assign_median_roles, mediank, prune_round

__version__ = "0.1.0"
