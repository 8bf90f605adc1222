from .base_config import BaseConfig
from .config_loader import load_experiment, load_mapping, save_experiment, spec_from_mapping
from .experiment_config import ExperimentSpec, IterationPlan
from .presets import PRESETS, get_preset
from .system_config import SystemConfig

__all__ = [
    "BaseConfig",
    "ExperimentSpec",
    "IterationPlan",
    "PRESETS",
    "SystemConfig",
    "get_preset",
    "load_experiment",
    "load_mapping",
    "save_experiment",
    "spec_from_mapping",
]
