from enum import Enum


class ChannelModel(str, Enum):
    IID_RAYLEIGH = "iid_rayleigh"
    PER_RAU_LARGE_SCALE = "per_rau_large_scale"


class PrecoderMode(str, Enum):
    COLUMNS = "columns"
    RIGHT_SINGULAR = "right_singular"


class RowSelection(str, Enum):
    FIRST = "first"
    RANDOM = "random"


class Scheme(str, Enum):
    r"""Iteration schedule of the receiver.

    IDD puts the LDPC decoder inside the loop, ID feeds demapper output back
    directly and decodes once at the end, LMMSE_BASELINE is the one-shot
    linear receiver.
    """
    IDD = "idd"
    ID = "id"
    LMMSE_BASELINE = "lmmse"


class RhoMode(str, Enum):
    PER_COLUMN = "per_column"
    PER_BLOCK = "per_block"


class DemapMode(str, Enum):
    MAX_LOG = "max_log"
    EXACT = "exact"
