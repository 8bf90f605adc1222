from .system_model import (
    ChannelRealization,
    TransmitBlock,
    build_precoder,
    codewords_per_user,
    complex_gaussian,
    draw_channel,
    estimate_channel,
    interleaver_for,
    random_payload,
    system_code,
    transmit,
)

__all__ = [
    "ChannelRealization",
    "TransmitBlock",
    "build_precoder",
    "codewords_per_user",
    "complex_gaussian",
    "draw_channel",
    "estimate_channel",
    "interleaver_for",
    "random_payload",
    "system_code",
    "transmit",
]
