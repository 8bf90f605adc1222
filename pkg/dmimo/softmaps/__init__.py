from .constellation import Constellation, get_constellation, label_bits, modulate
from .soft import (
    DEFAULT_LLR_CLAMP,
    LlrBlock,
    SigmoidLut,
    clamp_llrs,
    default_lut,
    demap_soft,
    soft_symbol_stats,
    symbol_prob,
    symbol_probabilities,
)

__all__ = [
    "Constellation",
    "DEFAULT_LLR_CLAMP",
    "LlrBlock",
    "SigmoidLut",
    "clamp_llrs",
    "default_lut",
    "demap_soft",
    "get_constellation",
    "label_bits",
    "modulate",
    "soft_symbol_stats",
    "symbol_prob",
    "symbol_probabilities",
]
