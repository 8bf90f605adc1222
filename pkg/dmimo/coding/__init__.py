from .codes import BUILTIN_PROTOTYPES, RATE_TO_CODE, expand_prototype, parse_prototype
from .interleaver import Interleaver, deinterleave, interleave
from .ldpc import (
    DecodeResult,
    LdpcCode,
    builtin_code,
    code_for,
    decode_siso,
    encode,
    read_alist,
    write_alist,
)

__all__ = [
    "BUILTIN_PROTOTYPES",
    "DecodeResult",
    "Interleaver",
    "LdpcCode",
    "RATE_TO_CODE",
    "builtin_code",
    "code_for",
    "decode_siso",
    "deinterleave",
    "encode",
    "expand_prototype",
    "interleave",
    "parse_prototype",
    "read_alist",
    "write_alist",
]
