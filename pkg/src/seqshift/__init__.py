"""seqshift - decoding engine and harness for language-domain shift in ASR decision rules."""

__version__ = "0.1.0"
