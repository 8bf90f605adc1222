from __future__ import annotations

from abc import ABC
from typing import Any

from pydantic import BaseModel, ConfigDict


class BaseConfig(ABC, BaseModel):
    r"""Base class for every configuration record.

    Configurations are immutable and reject unknown keys.
    """

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        extra="forbid",
        frozen=True,
        use_enum_values=False,
        protected_namespaces=(),
    )

    def as_dict(self) -> dict[str, Any]:
        r"""Convert the configuration to a plain dictionary.

        Enum members are rendered as their values and ``None`` entries are
        dropped, which keeps the output loadable by :meth:`model_validate`.

        Returns:
            dict[str, Any]: A JSON/YAML-serializable representation.
        """
        config_dict = self.model_dump(mode="json")
        return {k: v for k, v in config_dict.items() if v is not None}
