"""Coarse sequences, the subsequence relation, confluence and ``d_S``."""

from .confluence import DOWN, UP, JoinResult, MergeResult, join_pair, merge_chain
from .core import (
    FALSE,
    TRUE,
    UNKNOWN,
    CoarseSequence,
    Interleave,
    Joined,
    MonotoneWitness,
    PrefixAffine,
    Pushforward,
    RayRule,
    Reindexed,
    SeqCertificate,
    Transported,
    Verdict,
    certify_coarse_seq,
    compose_witnesses,
    eval_seq,
    even_subsequence,
    explicit,
    interleave_even_odd,
    push_forward,
    ray,
    replay_witness,
    seq_from_json,
    seq_to_json,
    transport_base,
    transport_witness,
)
from .distance import DistanceResult, Params, report_for, sequence_distance
from .subseq import greedy_match, is_subsequence, is_subsequence_str, replay_subsequence
from .supersequence import Supersequence, by_bridges, by_interleave

__all__ = [
    "DOWN", "UP", "JoinResult", "MergeResult", "join_pair", "merge_chain",
    "FALSE", "TRUE", "UNKNOWN", "CoarseSequence", "Interleave", "Joined", "MonotoneWitness",
    "PrefixAffine", "Pushforward", "RayRule", "Reindexed", "SeqCertificate", "Transported",
    "Verdict", "certify_coarse_seq", "compose_witnesses", "eval_seq", "even_subsequence",
    "explicit", "interleave_even_odd", "push_forward", "ray", "replay_witness", "seq_from_json",
    "seq_to_json", "transport_base", "transport_witness",
    "DistanceResult", "Params", "report_for", "sequence_distance",
    "greedy_match", "is_subsequence", "is_subsequence_str", "replay_subsequence",
    "Supersequence", "by_bridges", "by_interleave",
]
