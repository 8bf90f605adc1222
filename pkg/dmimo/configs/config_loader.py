# -*- coding: utf-8 -*-
"""
Experiment configuration files.

YAML (``.yaml``/``.yml``) and JSON are accepted; keys mirror the
:class:`ExperimentSpec` field names. ``base`` may also be given as a preset
name string, in which case ``base_overrides`` patches individual fields.
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

import yaml
from loguru import logger
from pydantic import ValidationError

from dmimo.configs.experiment_config import ExperimentSpec
from dmimo.configs.presets import get_preset
from dmimo.exceptions import ConfigValidationException, HarnessIOException


def load_mapping(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            if path.suffix.lower() == ".json":
                data = json.load(f)
            else:
                data = yaml.safe_load(f)
    except OSError as e:
        raise HarnessIOException(f"cannot read config ({e.strerror})", str(path)) from e
    except (yaml.YAMLError, json.JSONDecodeError) as e:
        raise ConfigValidationException(f"cannot parse {path}: {e}", {"path": str(path)}) from e
    if not isinstance(data, dict):
        raise ConfigValidationException(f"{path} must contain a mapping at top level",
                                        {"path": str(path)})
    return data


def spec_from_mapping(data: Dict[str, Any]) -> ExperimentSpec:
    """Validate a raw mapping into an :class:`ExperimentSpec`."""
    data = dict(data)
    base = data.get("base")
    overrides = data.pop("base_overrides", None) or {}
    if isinstance(base, str):
        data["base"] = {**get_preset(base).as_dict(), **overrides}
    elif overrides:
        data["base"] = {**(base or {}), **overrides}
    try:
        return ExperimentSpec.model_validate(data)
    except ValidationError as e:
        raise ConfigValidationException(f"invalid experiment configuration:\n{e}",
                                        {"errors": e.errors()}) from e


def load_experiment(path: Union[str, Path]) -> ExperimentSpec:
    r"""Load and validate an experiment configuration file.

    Args:
        path (Union[str, Path]): YAML or JSON file.

    Returns:
        ExperimentSpec: The validated specification.

    Raises:
        HarnessIOException: If the file cannot be read.
        ConfigValidationException: If parsing or validation fails.
    """
    path = Path(path)
    spec = spec_from_mapping(load_mapping(path))
    logger.info(f"Loaded experiment configuration from {path}")
    return spec


def save_experiment(spec: ExperimentSpec, path: Union[str, Path]) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(spec.as_dict(), f, sort_keys=False)
    except OSError as e:
        raise HarnessIOException(f"cannot write config ({e.strerror})", str(path)) from e
