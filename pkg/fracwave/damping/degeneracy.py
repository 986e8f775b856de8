"""Zero and degeneracy-order detection for sampled damping functions."""
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import logging
import numpy as np

from fracwave.common.errors import ProfileError
from fracwave.constants import (
    DEGENERACY_FIT_POINTS,
    DEGENERACY_SLOPE_TOL,
    DEGENERACY_THRESHOLD,
    LOCALIZED_RUN_POINTS,
)
from fracwave.spectral_core import GridField

LOCALIZED = "localized"
FINITE_DEGENERACY = "finite-degeneracy"
STRICTLY_POSITIVE = "strictly-positive"
ZERO = "zero"
INDETERMINATE = "indeterminate"

# Values at or below this fraction of max(chi) count as numerically vanishing.
VANISHING_FLOOR = 1e-14


@dataclass(frozen=True)
class Zero:
    """
    An isolated zero x_k of a damping function.

    Attributes:
        location: Grid point x_k where chi attains its local minimum.
        order: N_k with chi ~ (x - x_k)^{2 N_k}, or None when the fit is indeterminate.
        slope: Fitted slope of log chi against log |x - x_k|, nan if the fit was impossible.
        residual: RMS residual of that fit.
    """
    location: float
    order: Optional[int]
    slope: float
    residual: float


@dataclass(frozen=True)
class DegeneracyReport:
    zeros: Tuple[Zero, ...]
    classification: str
    max_order: Optional[int]
    vanishing_intervals: Tuple[Tuple[float, float], ...] = ()


def _below_threshold_runs(below: np.ndarray) -> List[np.ndarray]:
    """Maximal runs of consecutive True entries on a periodic index set."""
    M = len(below)
    if not below.any():
        return []
    if below.all():
        return [np.arange(M)]
    start = int(np.argmin(below))  # first index that is above threshold
    runs, current = [], []
    for offset in range(1, M + 1):
        j = (start + offset) % M
        if below[j]:
            current.append(j)
        elif current:
            runs.append(np.array(current))
            current = []
    if current:
        runs.append(np.array(current))
    return runs


def _fit_order(values: np.ndarray, j: int, spacing: float) -> Tuple[Optional[int], float, float]:
    M = len(values)
    offsets = np.arange(1, DEGENERACY_FIT_POINTS + 1)
    neighbours = np.concatenate([values[(j + offsets) % M], values[(j - offsets) % M]])
    distances = np.concatenate([offsets, offsets]) * spacing
    if np.any(neighbours <= 0) or not np.all(np.isfinite(neighbours)):
        return None, float("nan"), float("nan")

    log_d, log_v = np.log(distances), np.log(neighbours)
    slope, intercept = np.polyfit(log_d, log_v, 1)
    residual = float(np.sqrt(np.mean((log_v - (slope * log_d + intercept)) ** 2)))
    nearest = int(round(slope))
    if abs(slope - nearest) > DEGENERACY_SLOPE_TOL or nearest < 2 or nearest % 2:
        return None, float(slope), residual
    return nearest // 2, float(slope), residual


def detect_zeros_degeneracy(
    profile: Union[GridField, "DampingProfile"],  # noqa: F821
    threshold: float = DEGENERACY_THRESHOLD,
) -> DegeneracyReport:
    """
    Locate the zeros of a damping function and estimate their vanishing orders.

    A zero is a grid-local minimum with chi below threshold * max(chi). Its order N_k is half
    the slope of a least-squares fit of log chi against log |x - x_k| over the nearest grid
    points on each side. A sub-threshold run of at least three points on which the fit fails
    and chi numerically vanishes is a vanishing interval, which makes the profile "localized".
    A sub-threshold dip whose minimum does not vanish and whose fit fails is not a zero.

    Args:
        profile: Samples, or a profile carrying `samples`.
        threshold: Relative threshold, default 1e-8.

    Returns:
        DegeneracyReport with zeros, classification and the largest order N.
    """
    if not threshold > 0:
        raise ProfileError(f"Threshold must be positive, got {threshold}")
    samples = getattr(profile, "samples", profile)
    values = samples.values
    peak = float(np.max(values))
    if peak <= 0:
        return DegeneracyReport(zeros=(), classification=ZERO, max_order=None)

    below = values < threshold * peak
    zeros: List[Zero] = []
    intervals: List[Tuple[float, float]] = []
    spacing = samples.spec.spacing
    points = samples.spec.points

    for run in _below_threshold_runs(below):
        j = int(run[np.argmin(values[run])])
        order, slope, residual = _fit_order(values, j, spacing)
        vanishes = values[j] <= VANISHING_FLOOR * peak
        if order is not None:
            zeros.append(Zero(float(points[j]), order, slope, residual))
        elif len(run) >= LOCALIZED_RUN_POINTS and vanishes:
            intervals.append((float(points[run[0]]), float(points[run[-1]])))
        elif vanishes:
            zeros.append(Zero(float(points[j]), None, slope, residual))
        else:
            logging.debug(f"Ignoring positive dip at x={points[j]:.6f} (chi={values[j]:.3e})")

    if intervals:
        classification = LOCALIZED
    elif any(z.order is None for z in zeros):
        classification = INDETERMINATE
    elif zeros:
        classification = FINITE_DEGENERACY
    else:
        classification = STRICTLY_POSITIVE

    orders = [z.order for z in zeros if z.order is not None]
    max_order = max(orders) if classification == FINITE_DEGENERACY else None
    return DegeneracyReport(
        zeros=tuple(sorted(zeros, key=lambda z: z.location)),
        classification=classification,
        max_order=max_order,
        vanishing_intervals=tuple(intervals),
    )
