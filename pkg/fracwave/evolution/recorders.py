"""Recorders that collect samples of a running integration."""

from abc import ABC, abstractmethod
from typing import List

import numpy as np

from fracwave.common.interfaces import IntegrationContext
from fracwave.evolution.state import StateVector, energy


class BaseRecorder(ABC):
    """Abstract base class for recorder implementations."""

    def __init__(self, context: IntegrationContext) -> None:
        """
        Constructor for the BaseRecorder class.

        Args:
            context: Grid of the run, used to unpack states.
        """
        self.context = context
        self.times: List[float] = []

    @abstractmethod
    def record(self, t: float, y: np.ndarray) -> None:
        """
        Store a sample of the packed state.

        Args:
            t: Sample time
            y: Packed state [u_hat, v_hat, q]
        """
        pass


class EnergyRecorder(BaseRecorder):
    """Keeps the energy and the accumulated dissipation at every sample time."""

    def __init__(self, context: IntegrationContext) -> None:
        super().__init__(context)
        self.energies: List[float] = []
        self.dissipation: List[float] = []

    def record(self, t: float, y: np.ndarray) -> None:
        state = StateVector.unpack(y, self.context.spec)
        self.times.append(float(t))
        self.energies.append(energy(state))
        self.dissipation.append(float(y[-1].real))


class SnapshotRecorder(EnergyRecorder):
    """
    Energy recorder that also keeps the full state at every sample time.
    """

    def __init__(self, context: IntegrationContext) -> None:
        super().__init__(context)
        self.snapshots: List[StateVector] = []

    def record(self, t: float, y: np.ndarray) -> None:
        super().record(t, y)
        self.snapshots.append(StateVector.unpack(np.array(y), self.context.spec))
