"""Decoders: time-synchronous (FH, CTC), transducer and label-synchronous search."""

from seqshift.search.beam import Beam, DecodeResult, Hypothesis
from seqshift.search.label_sync import decode_label_sync, length_normalized, max_label_steps
from seqshift.search.time_sync import decode_time_sync
from seqshift.search.transducer import decode_transducer

__all__ = [
    "Beam",
    "DecodeResult",
    "Hypothesis",
    "decode_label_sync",
    "decode_time_sync",
    "decode_transducer",
    "length_normalized",
    "max_label_steps",
]
