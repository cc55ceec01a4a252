"""
RunManifest -- the record every CLI command writes next to its outputs.
"""

from datetime import datetime
from typing import Any

from pydantic import BaseModel
from pydantic import Field


class RunManifest(BaseModel):
    """Resolved configuration and provenance of one command run.

    `options` holds the exact keyword arguments the command ran with;
    `vqar rerun` feeds them back to the same command.
    """

    command: str
    options: dict[str, Any] = Field(default_factory=dict)
    config: dict[str, Any] = Field(default_factory=dict)
    inputs: list[str] = Field(default_factory=list)
    outputs: list[str] = Field(default_factory=list)
    version: str
    started_at: datetime
    duration_seconds: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return self.model_dump(mode="json")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunManifest":
        return cls.model_validate(data)
