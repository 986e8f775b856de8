"""Phase-space states (u, u_t), their energy and the named initial data."""
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional

import logging
import numpy as np

from fracwave.common.errors import FracwaveError, ResolutionError
from fracwave.constants import LOCALIZED_IC_FREQUENCY
from fracwave.damping.profiles import make_profile
from fracwave.spectral_core import GridField, GridSpec, ModeField, h_half_norm, l2_norm, to_modes


@dataclass(frozen=True, eq=False)
class StateVector:
    """
    A state (u, v = u_t) in H^{1/2} x L^2, both components on the same grid.

    Attributes:
        u: Displacement coefficients
        v: Velocity coefficients
    """
    u: ModeField
    v: ModeField

    def __post_init__(self) -> None:
        if self.u.spec.M != self.v.spec.M:
            raise ResolutionError(f"Resolution mismatch: u on {self.u.spec.M}, v on {self.v.spec.M} points")

    @property
    def spec(self) -> GridSpec:
        return self.u.spec

    @property
    def is_real(self) -> bool:
        return self.u.is_hermitian() and self.v.is_hermitian()

    def pack(self, dissipated: float = 0.0) -> np.ndarray:
        """Flatten to [u_hat, v_hat, q] with q the accumulated dissipation."""
        return np.concatenate([self.u.coeffs, self.v.coeffs, [dissipated]]).astype(complex)

    @classmethod
    def unpack(cls, y: np.ndarray, spec: GridSpec) -> "StateVector":
        M = spec.M
        return cls(ModeField(spec, y[:M]), ModeField(spec, y[M:2 * M]))


def energy(state: StateVector) -> float:
    """E = ||u||_{H^{1/2}}^2 + ||v||_{L^2}^2."""
    return h_half_norm(state.u) ** 2 + l2_norm(state.v) ** 2


def _sine(spec: GridSpec, modes: Optional[Mapping[int, complex]]) -> ModeField:
    return to_modes(GridField(spec, np.sin(spec.points)))


def _localized_highfreq(spec: GridSpec, modes: Optional[Mapping[int, complex]]) -> ModeField:
    # chi3 envelope recentred at 0, carrying cos(10x)
    envelope = make_profile("chi3", 0.25, spec)(spec.points + np.pi)
    return to_modes(GridField(spec, envelope * np.cos(LOCALIZED_IC_FREQUENCY * spec.points)))


def _custom_modes(spec: GridSpec, modes: Optional[Mapping[int, complex]]) -> ModeField:
    if not modes:
        raise FracwaveError("custom-modes initial data needs a non-empty mapping of modes")
    return ModeField.from_modes(dict(modes), spec)


INITIAL_CONDITIONS: Dict[str, Callable[[GridSpec, Optional[Mapping[int, complex]]], ModeField]] = {
    "localized-highfreq": _localized_highfreq,
    "sine": _sine,
    "custom-modes": _custom_modes,
}


def initial_condition(
    name: str,
    spec: GridSpec = GridSpec(),
    modes: Optional[Mapping[int, complex]] = None,
) -> StateVector:
    """
    Named initial data with zero initial velocity.

    Args:
        name: localized-highfreq (a wave packet at frequency 10 supported near x = 0),
            sine (u = sin x) or custom-modes (u_hat given by `modes`).
        spec: Grid to build the state on.
        modes: Mapping {n: u_hat(n)} for custom-modes.

    Raises:
        FracwaveError: For an unknown name or missing modes.
        ResolutionError: If a requested mode does not fit on the grid.
    """
    if name not in INITIAL_CONDITIONS:
        raise FracwaveError(f"Unknown initial condition: {name} (expected one of {', '.join(INITIAL_CONDITIONS)})")
    u = INITIAL_CONDITIONS[name](spec, modes)
    state = StateVector(u, ModeField(spec, np.zeros(spec.M)))
    if not state.is_real:
        logging.warning(f"Initial condition {name} is complex-valued; energy identities still hold")
    return state
