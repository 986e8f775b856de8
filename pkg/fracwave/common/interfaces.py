"""
Common data shared across the simulation components.
"""
from dataclasses import dataclass

import numpy as np

from fracwave.spectral_core import GridField, GridSpec


@dataclass(frozen=True, eq=False)
class IntegrationContext:
    """
    Shared, precomputed data for the components of one integration.

    Provides grid information to dampers and recorders without creating direct
    dependencies between them.

    Attributes:
        spec: Grid of the run
        chi: Damping samples chi(x_j)
    """
    spec: GridSpec
    chi: GridField

    @classmethod
    def build(cls, spec: GridSpec, chi: np.ndarray) -> "IntegrationContext":
        return cls(spec=spec, chi=GridField(spec, chi))
