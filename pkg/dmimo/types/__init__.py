from .enums import (
    ChannelModel,
    DemapMode,
    PrecoderMode,
    RhoMode,
    RowSelection,
    Scheme,
)

__all__ = [
    "ChannelModel",
    "DemapMode",
    "PrecoderMode",
    "RhoMode",
    "RowSelection",
    "Scheme",
]
