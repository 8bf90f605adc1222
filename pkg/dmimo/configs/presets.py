# -*- coding: utf-8 -*-
"""
Named system presets.

desk        small enough for minutes-scale Monte Carlo runs, same structure
            as the 32x32 deployment
cqi6_32x32  4 RAUs x 8 antennas, 4 users x 8 antennas, 4 streams, 16-QAM, R=3/4
cqi7_32x32  as cqi6 with 64-QAM, R=2/3
"""

from typing import Callable, Dict

from dmimo.configs.system_config import SystemConfig
from dmimo.exceptions import ConfigValidationException

PRESETS: Dict[str, Callable[[], SystemConfig]] = {
    "desk": lambda: SystemConfig(
        num_raus=2, num_users=2, rau_antennas=4, user_antennas=4,
        streams=[2, 2], bits_per_symbol=4, code_rate="1/2", block_length=162,
    ),
    "cqi6_32x32": lambda: SystemConfig(
        num_raus=4, num_users=4, rau_antennas=8, user_antennas=8,
        streams=[4, 4, 4, 4], bits_per_symbol=4, code_rate="3/4", block_length=162,
    ),
    "cqi7_32x32": lambda: SystemConfig(
        num_raus=4, num_users=4, rau_antennas=8, user_antennas=8,
        streams=[4, 4, 4, 4], bits_per_symbol=6, code_rate="2/3", block_length=162,
    ),
}


def get_preset(name: str) -> SystemConfig:
    """Return a fresh copy of a named preset."""
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigValidationException(
            f"unknown preset '{name}', choose from {', '.join(PRESETS)}",
            {"preset": name},
        )
