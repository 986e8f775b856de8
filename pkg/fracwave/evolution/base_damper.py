"""Base class for damper implementations."""

from abc import ABC, abstractmethod
from typing import Tuple

import logging
import numpy as np

from fracwave.common.interfaces import IntegrationContext
from fracwave.spectral_core import ModeField, apply_multiplication


class BaseDamper(ABC):
    """Abstract base class for the damping operator B acting on the velocity."""

    name = "base"

    def __init__(self, context: IntegrationContext) -> None:
        """
        Constructor for the BaseDamper class.

        Args:
            context: Grid and damping samples of the run
        """
        self.context = context
        logging.debug(f"Initialized damper: {self.name} on {context.spec.M} points")

    @abstractmethod
    def damped_field(self, v: ModeField) -> ModeField:
        """
        The field w whose chi-weighted square is dissipated.

        Args:
            v: Velocity coefficients

        Returns:
            Coefficients of w
        """
        pass

    @abstractmethod
    def project(self, product: ModeField) -> ModeField:
        """Map the coefficients of chi * w to the coefficients of Bv."""
        pass

    def evaluate(self, v_hat: np.ndarray) -> Tuple[np.ndarray, float]:
        """
        Apply B and compute the instantaneous energy loss.

        Args:
            v_hat: Velocity coefficients in FFT order

        Returns:
            The coefficients of Bv and 2 int chi |w|^2 dx.
        """
        w = self.damped_field(ModeField(self.context.spec, v_hat))
        product = apply_multiplication(self.context.chi, w)
        # discrete Parseval: int conj(w) chi w dx = 2pi sum_n conj(w_hat) (chi w)_hat
        rate = 4.0 * np.pi * float(np.vdot(w.coeffs, product.coeffs).real)
        return self.project(product).coeffs, rate
