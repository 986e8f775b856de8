"""Concrete damping models."""
from typing import Dict, Type

from fracwave.common.errors import FracwaveError
from fracwave.common.interfaces import IntegrationContext
from fracwave.evolution.base_damper import BaseDamper
from fracwave.spectral_core import ModeField, apply_fractional_laplacian


class MultiplicativeDamper(BaseDamper):
    """
    B v = chi v, the damping of the equation u_tt + |D| u + chi u_t = 0.
    """

    name = "multiplicative"

    def damped_field(self, v: ModeField) -> ModeField:
        return v

    def project(self, product: ModeField) -> ModeField:
        return product


class HalfWaveDamper(BaseDamper):
    """
    B v = |D|^{1/2} chi |D|^{1/2} v, the symmetrised half-wave damping.

    Dissipates the chi-weighted norm of |D|^{1/2} v, so the constant mode is never damped.
    """

    name = "half-wave"

    def damped_field(self, v: ModeField) -> ModeField:
        return apply_fractional_laplacian(v, 0.5)

    def project(self, product: ModeField) -> ModeField:
        return apply_fractional_laplacian(product, 0.5)


BUILTIN_DAMPERS: Dict[str, Type[BaseDamper]] = {
    MultiplicativeDamper.name: MultiplicativeDamper,
    HalfWaveDamper.name: HalfWaveDamper,
}


def build_damper(kind: str, context: IntegrationContext) -> BaseDamper:
    """
    Instantiate a registered damper.

    Raises:
        FracwaveError: For an unknown damping model.
    """
    if kind not in BUILTIN_DAMPERS:
        raise FracwaveError(f"Unknown damping model: {kind} (expected one of {', '.join(BUILTIN_DAMPERS)})")
    return BUILTIN_DAMPERS[kind](context)
