"""Damping profiles chi >= 0 on the circle."""
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple, Union

import logging
import numpy as np
from scipy.signal import resample

from fracwave.common.errors import ProfileError, ResolutionError
from fracwave.constants import (
    CHI3_HALF_WIDTH,
    CHI3_STEEPNESS,
    DEFAULT_NU,
    DEGENERACY_THRESHOLD,
    NONNEGATIVE_TOL,
)
from fracwave.damping.degeneracy import DegeneracyReport, Zero, detect_zeros_degeneracy
from fracwave.io.artifacts import read_table
from fracwave.spectral_core import GridField, GridSpec, ModeField, to_grid, to_modes


def chi1_shape(x: np.ndarray) -> np.ndarray:
    """Low-frequency damping cos^2 x, vanishing to second order at pi/2 and 3pi/2."""
    return np.cos(x) ** 2


def chi2_shape(x: np.ndarray) -> np.ndarray:
    """Gaussian damping centred at pi, evaluated on [0, 2pi) without periodic images."""
    return np.exp(-2.0 * (x - np.pi) ** 2)


def chi3_shape(x: np.ndarray) -> np.ndarray:
    """Smoothed indicator of [pi - 1/4, pi + 1/4]."""
    return 0.5 * (
        np.tanh(CHI3_STEEPNESS * (x - np.pi + CHI3_HALF_WIDTH))
        - np.tanh(CHI3_STEEPNESS * (x - np.pi - CHI3_HALF_WIDTH))
    )


def constant_shape(x: np.ndarray) -> np.ndarray:
    return np.ones_like(x)


def zero_shape(x: np.ndarray) -> np.ndarray:
    return np.zeros_like(x)


# Built-in closed forms at unit amplitude
BUILTIN_PROFILES: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "chi1": chi1_shape,
    "chi2": chi2_shape,
    "chi3": chi3_shape,
    "constant": constant_shape,
    "zero": zero_shape,
}

PROFILE_KINDS = tuple(BUILTIN_PROFILES) + ("custom",)


@dataclass(frozen=True, eq=False)
class DampingProfile:
    """
    A sampled damping function chi >= 0 with its Fourier data and zero structure.

    Attributes:
        kind: One of chi1, chi2, chi3, constant, zero, custom
        nu: Amplitude parameter
        samples: chi(x_j) on the grid
        fourier: chi_hat(n) for |n| <= M/2
        report: Zeros, degeneracy orders and classification
    """
    kind: str
    nu: float
    samples: GridField = field(repr=False)
    fourier: ModeField = field(repr=False)
    report: DegeneracyReport

    @property
    def spec(self) -> GridSpec:
        return self.samples.spec

    @property
    def zeros(self) -> Tuple[Zero, ...]:
        return self.report.zeros

    @property
    def classification(self) -> str:
        return self.report.classification

    @property
    def max_order(self) -> Optional[int]:
        return self.report.max_order

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate a built-in profile at arbitrary points, wrapped to [0, 2pi)."""
        if self.kind not in BUILTIN_PROFILES:
            raise ProfileError(f"Profile of kind '{self.kind}' has no closed form")
        return self.nu * BUILTIN_PROFILES[self.kind](np.mod(x, 2.0 * np.pi))


def _assemble(kind: str, nu: float, samples: GridField, threshold: float) -> DampingProfile:
    if np.min(samples.values) < -NONNEGATIVE_TOL:
        raise ProfileError(f"Damping must be non-negative; minimum sample is {np.min(samples.values):.3e}")
    report = detect_zeros_degeneracy(samples, threshold)
    profile = DampingProfile(kind=kind, nu=float(nu), samples=samples, fourier=to_modes(samples), report=report)
    logging.debug(f"Built {kind} profile nu={nu} on {samples.spec.M} points: {report.classification}")
    return profile


def make_profile(
    kind: str,
    nu: Optional[float] = None,
    spec: GridSpec = GridSpec(),
    threshold: float = DEGENERACY_THRESHOLD,
) -> DampingProfile:
    """
    Build one of the built-in damping profiles at amplitude nu.

    Args:
        kind: chi1 (nu cos^2 x), chi2 (nu e^{-2(x-pi)^2}), chi3 (nu/2 [tanh(20(x-pi+1/4)) -
            tanh(20(x-pi-1/4))]), constant (nu) or zero.
        nu: Amplitude; defaults to the value used for the reported experiments.
        spec: Grid to sample on.
        threshold: Relative threshold for zero detection.

    Raises:
        ProfileError: For an unknown kind or a negative amplitude.
    """
    if kind not in BUILTIN_PROFILES:
        raise ProfileError(f"Unknown damping kind: {kind} (expected one of {', '.join(PROFILE_KINDS)})")
    nu = DEFAULT_NU[kind] if nu is None else float(nu)
    if kind == "zero":
        nu = 0.0
    if not np.isfinite(nu) or nu < 0:
        raise ProfileError(f"Amplitude nu must be non-negative, got {nu}")
    samples = GridField(spec, nu * BUILTIN_PROFILES[kind](spec.points))
    return _assemble(kind, nu, samples, threshold)


def custom_profile(
    values: Union[np.ndarray, Callable[[np.ndarray], np.ndarray]],
    spec: GridSpec = GridSpec(),
    nu: float = 1.0,
    threshold: float = DEGENERACY_THRESHOLD,
) -> DampingProfile:
    """Wrap grid samples (or a function evaluated on the grid) as a custom profile."""
    samples = values(spec.points) if callable(values) else values
    return _assemble("custom", nu, GridField(spec, samples), threshold)


def resample_profile(x: np.ndarray, values: np.ndarray, spec: GridSpec) -> DampingProfile:
    """
    Trigonometric interpolation of uniformly spaced samples on [0, 2pi) onto the grid.

    Raises:
        ProfileError: If the abscissae are not a uniform grid of [0, 2pi).
    """
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.shape != values.shape or len(x) < 2:
        raise ProfileError("Custom profile needs two equal-length columns with at least two rows")
    step = 2.0 * np.pi / len(x)
    if not (np.allclose(np.diff(x), step, rtol=1e-6, atol=1e-9) and abs(x[0]) < 1e-9):
        raise ProfileError("Custom profile abscissae must be the uniform grid 2pi j/K, j = 0..K-1")
    fitted = values if len(values) == spec.M else resample(values, spec.M)
    return custom_profile(fitted, spec)


def with_nu(profile: DampingProfile, nu: Optional[float]) -> DampingProfile:
    """
    The same profile shape at amplitude nu. Returns the profile unchanged when nu is None.
    """
    if nu is None or float(nu) == profile.nu:
        return profile
    if profile.kind in BUILTIN_PROFILES:
        return make_profile(profile.kind, nu, profile.spec)
    if nu < 0:
        raise ProfileError(f"Amplitude nu must be non-negative, got {nu}")
    if profile.nu == 0:
        raise ProfileError("Cannot rescale a custom profile of zero amplitude")
    return custom_profile(profile.samples.values * (float(nu) / profile.nu), profile.spec, nu=float(nu))


def fourier_coefficient(profile: DampingProfile, n: int) -> complex:
    """
    chi_hat(n) = (1/2pi) int e^{-inx} chi(x) dx.

    Raises:
        ResolutionError: If |n| > M/2.
    """
    return profile.fourier.coefficient(n)


def bump_function(center: float, radius: float, spec: GridSpec = GridSpec()) -> DampingProfile:
    """
    Smooth bump a(x) = exp(1 - 1/(1 - ((x - center)/radius)^2)) on |x - center| < radius,
    zero elsewhere, with distances measured on the circle. a(center) = 1.

    Raises:
        ProfileError: Unless 0 < radius < pi.
    """
    if not 0 < radius < np.pi:
        raise ProfileError(f"Bump radius must lie in (0, pi), got {radius}")
    offset = np.mod(spec.points - center + np.pi, 2.0 * np.pi) - np.pi
    y = offset / radius
    inside = np.abs(y) < 1
    values = np.zeros(spec.M)
    values[inside] = np.exp(1.0 - 1.0 / (1.0 - y[inside] ** 2))
    return custom_profile(values, spec)


@dataclass(frozen=True, eq=False)
class LowFrequencyApproximation:
    """
    Band-limited part of chi seen by the truncated pencil P_N.

    Attributes:
        N: Truncation order; modes |n| <= 2N are kept.
        samples: sum_{|n| <= 2N} chi_hat(n) e^{inx} on the grid
        sup_error: max_j |chi(x_j) - chi_N(x_j)|
    """
    N: int
    samples: GridField = field(repr=False)
    sup_error: float


def low_frequency_approximation(profile: DampingProfile, N: int) -> LowFrequencyApproximation:
    spec = profile.spec
    if 2 * N > spec.max_mode:
        raise ResolutionError(f"Truncation N={N} needs modes up to {2 * N}; grid has {spec.max_mode}")
    kept = np.abs(spec.wavenumbers) <= 2 * N
    filtered = ModeField(spec, np.where(kept, profile.fourier.coeffs, 0.0))
    samples = to_grid(filtered)
    return LowFrequencyApproximation(
        N=N,
        samples=samples,
        sup_error=float(np.max(np.abs(samples.values - profile.samples.values))),
    )


def load_custom_profile(path: str, spec: GridSpec = GridSpec()) -> DampingProfile:
    """
    Read a two-column CSV (x, chi(x)) sampled uniformly on [0, 2pi) and resample it onto the grid.

    Raises:
        ConfigError: If the file cannot be read.
        ProfileError: If the abscissae are not uniform or chi is negative.
    """
    _, data = read_table(path, min_columns=2)
    logging.info(f"Loaded {len(data)} damping samples from {path}")
    return resample_profile(data[:, 0], data[:, 1], spec)
