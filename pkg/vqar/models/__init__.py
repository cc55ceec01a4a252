"""
vqar data models. Configuration and provenance, zero numerical logic.
"""

from vqar.models.config import FitConfig
from vqar.models.config import GridConfig
from vqar.models.config import KernelSpec
from vqar.models.config import SimConfig
from vqar.models.config import VQARConfig
from vqar.models.config import load_config
from vqar.models.enums import KernelKind
from vqar.models.enums import SimCase
from vqar.models.manifest import RunManifest

__all__ = [
    "FitConfig",
    "GridConfig",
    "KernelKind",
    "KernelSpec",
    "RunManifest",
    "SimCase",
    "SimConfig",
    "VQARConfig",
    "load_config",
]
