"""
Energy decay fits and the decay rates predicted from the zero structure of the damping.
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import logging
import numpy as np

from fracwave.common.errors import DecayFitError
from fracwave.constants import ENERGY_FLOOR, MIN_FIT_SAMPLES
from fracwave.damping.degeneracy import (
    FINITE_DEGENERACY,
    INDETERMINATE,
    LOCALIZED,
    STRICTLY_POSITIVE,
    ZERO,
)
from fracwave.damping.profiles import DampingProfile
from fracwave.evolution.integrator import Trajectory
from fracwave.resonance import ResonanceSet

EXPONENTIAL = "exponential"

# Sample times are multiples of sample_dt; window edges are matched with this slack.
_EDGE_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class DecayFit:
    """
    A power-law fit E(t) ~ C t^{-p} over a time window.

    Attributes:
        window: (t_min, t_max) of the fit
        exponent: p
        residual: RMS residual of the log-log fit
        compensated: Rows (t, t^p E(t)) over the window
        samples: Number of samples used
        noise_limited: Some window energies lie below the integration error, measured as
            the largest balance defect |E + dissipation - E(0)| up to the end of the window
    """
    window: Tuple[float, float]
    exponent: float
    residual: float
    compensated: np.ndarray = field(repr=False)
    samples: int = 0
    noise_limited: bool = False

    @property
    def compensated_spread(self) -> float:
        """max / min of the compensated series; below 10 means within one order of magnitude."""
        values = self.compensated[:, 1]
        return float(np.max(values) / np.min(values))


@dataclass(frozen=True)
class PredictedRate:
    """
    Decay rate predicted from the damping's zero structure.

    Attributes:
        rate: Polynomial exponent, or "exponential" for damping bounded below
        classification: Classification of the damping profile
        approached_from_below: The bound holds for every exponent below `rate`, not at it
        note: Human-readable statement of the prediction
    """
    rate: Union[float, str]
    classification: str
    approached_from_below: bool
    note: str


def default_window(traj: Trajectory) -> Tuple[float, float]:
    """The last decade of simulated time, never starting before t = 1."""
    t_end = float(traj.times[-1])
    return max(t_end / 10.0, 1.0), t_end


def fit_exponent(traj: Trajectory, window: Optional[Tuple[float, float]] = None) -> DecayFit:
    """
    Least-squares fit of log E against log t over a window.

    Args:
        traj: Sampled energies.
        window: (t_min, t_max). Defaults to the last decade, in which case samples with
            E < 1e-12 E(0) are dropped.

    Returns:
        DecayFit with exponent p = -slope.

    Raises:
        DecayFitError: If E(0) is not positive, the window is invalid, holds fewer than ten
            samples or contains non-positive energies.
    """
    times, energies = np.asarray(traj.times, dtype=float), np.asarray(traj.energies, dtype=float)
    if not energies[0] > 0:
        raise DecayFitError(f"Initial energy must be positive, got {energies[0]}")
    if window is None:
        t_min, t_max = default_window(traj)
    else:
        t_min, t_max = float(window[0]), float(window[1])
    if t_min < 1.0 or t_max <= t_min:
        raise DecayFitError(f"Fit window must satisfy 1 <= t_min < t_max, got [{t_min}, {t_max}]")
    if t_min < times[0] - _EDGE_SLACK or t_max > times[-1] + _EDGE_SLACK:
        raise DecayFitError(
            f"Fit window [{t_min}, {t_max}] exceeds the trajectory range [{times[0]}, {times[-1]}]"
        )

    mask = (times >= t_min - _EDGE_SLACK) & (times <= t_max + _EDGE_SLACK)
    if window is None:
        dropped = mask & (energies < ENERGY_FLOOR * energies[0])
        if dropped.any():
            logging.info(f"Dropping {int(dropped.sum())} samples below the energy floor")
        mask &= ~dropped
    elif np.any(energies[mask] <= 0):
        raise DecayFitError("Energy has decayed to zero inside the fit window")
    if mask.sum() < MIN_FIT_SAMPLES:
        raise DecayFitError(f"Fit window holds {int(mask.sum())} samples; need at least {MIN_FIT_SAMPLES}")

    log_t, log_e = np.log(times[mask]), np.log(energies[mask])
    slope, intercept = np.polyfit(log_t, log_e, 1)
    residual = float(np.sqrt(np.mean((log_e - (slope * log_t + intercept)) ** 2)))
    exponent = float(-slope)
    compensated = np.column_stack([times[mask], times[mask] ** exponent * energies[mask]])
    logging.info(f"Fitted exponent {exponent:.4f} on [{t_min}, {t_max}] (residual {residual:.3e})")
    noise_floor = float(np.max(traj.conservation_defect[times <= t_max + _EDGE_SLACK])) * energies[0]
    noise_limited = bool(np.min(energies[mask]) < noise_floor)
    if noise_limited:
        logging.warning(f"Fit window reaches energies below the integration error {noise_floor:.3e}")
    return DecayFit(
        window=(t_min, t_max),
        exponent=exponent,
        residual=residual,
        compensated=compensated,
        samples=int(mask.sum()),
        noise_limited=noise_limited,
    )


def predicted_exponent(profile: DampingProfile) -> PredictedRate:
    """
    Decay rate for data in the energy space with one extra derivative.

    Localized damping gives t^{-2}; damping with zeros of maximal order 2N gives
    t^{-(2 + 1/N - gamma)} for every gamma > 0; damping bounded below decays exponentially.

    Raises:
        DecayFitError: If the zero structure is indeterminate.
    """
    kind = profile.classification
    if kind == LOCALIZED:
        return PredictedRate(2.0, kind, False, "E(t) <= C / t^2")
    if kind == FINITE_DEGENERACY:
        N = profile.max_order
        rate = 2.0 + 1.0 / N
        return PredictedRate(rate, kind, True, f"E(t) <= C / t^(2 + 1/{N} - gamma) for every gamma > 0")
    if kind == STRICTLY_POSITIVE:
        return PredictedRate(EXPONENTIAL, kind, False, "damping bounded below: exponential decay")
    if kind == ZERO:
        return PredictedRate(0.0, kind, False, "no damping: energy is conserved")
    if kind == INDETERMINATE:
        raise DecayFitError("Damping has a zero of indeterminate order; no rate can be predicted")
    raise DecayFitError(f"Unknown classification: {kind}")


def compensated_energy(traj: Trajectory, p: float) -> np.ndarray:
    """
    Rows (t, t^p E(t)) for every sample with t > 0.

    Raises:
        DecayFitError: If p is negative.
    """
    if not p >= 0:
        raise DecayFitError(f"Compensation power must be non-negative, got {p}")
    times, energies = np.asarray(traj.times), np.asarray(traj.energies)
    positive = times > 0
    return np.column_stack([times[positive], times[positive] ** p * energies[positive]])


def exponential_rate(traj: Trajectory) -> np.ndarray:
    """
    Rows (t, -log(E(t)/E(0)) / (2t)): the observed exponential rate of E^{1/2}.

    Samples with t = 0 or non-positive energy are skipped.
    """
    times, energies = np.asarray(traj.times), np.asarray(traj.energies)
    if energies[0] <= 0:
        raise DecayFitError("Initial energy must be positive")
    usable = (times > 0) & (energies > 0)
    rates = -np.log(energies[usable] / energies[0]) / (2.0 * times[usable])
    return np.column_stack([times[usable], rates])


def resonance_rate(resonances: ResonanceSet) -> float:
    """|Im tau| of the nonzero resonance closest to the real axis."""
    return float(abs(resonances.slowest().imag))


def fit_summary(fit: DecayFit, prediction: Optional[PredictedRate] = None) -> dict:
    """JSON-ready record {window, exponent, residual, predicted, classification}."""
    return {
        "window": [fit.window[0], fit.window[1]],
        "exponent": fit.exponent,
        "residual": fit.residual,
        "samples": fit.samples,
        "noise_limited": fit.noise_limited,
        "predicted": None if prediction is None else prediction.rate,
        "classification": None if prediction is None else prediction.classification,
    }
