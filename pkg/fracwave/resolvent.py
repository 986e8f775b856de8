"""
Norms of the truncated resolvent P_N(tau)^{-1} and of its semiclassical rescaling, real-axis
sweeps of those norms, and the quasimode sharpness experiment.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence, Tuple

import logging
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, InstanceOf, model_validator
from scipy.linalg import svdvals

from fracwave.common.errors import FracwaveError, NearResonanceError, ResolutionError
from fracwave.config import sweep_workers
from fracwave.constants import DEFAULT_MODES, DEFAULT_SWEEP_STEPS, NEAR_RESONANCE_SIGMA
from fracwave.damping.profiles import DampingProfile, with_nu
from fracwave.resonance import OperatorPencil, build_pencil
from fracwave.spectral_core import (
    ModeField,
    apply_fractional_laplacian,
    apply_multiplication,
    require_same_grid,
    to_modes,
)


@dataclass(frozen=True)
class ResolventSample:
    """
    One evaluation of ||P_N(tau)^{-1}||.

    Attributes:
        tau: Spectral parameter
        norm: 1 / sigma_min, or inf at or near a resonance
        N: Truncation order
        flagged: |tau|^2 > N/2, where the truncation is unreliable
        near_resonance: sigma_min fell below 1e-14
    """
    tau: complex
    norm: float
    N: int
    flagged: bool
    near_resonance: bool = False


def is_unreliable(tau: complex, N: int) -> bool:
    return abs(tau) ** 2 > N / 2.0


def _inverse_norm(matrix: np.ndarray, tau: complex) -> float:
    sigma_min = float(svdvals(matrix)[-1])
    if sigma_min < NEAR_RESONANCE_SIGMA:
        raise NearResonanceError(tau, sigma_min)
    return 1.0 / sigma_min


def resolvent_norm(pencil: OperatorPencil, tau: complex) -> ResolventSample:
    """
    ||P_N(tau)^{-1}|| as the reciprocal of the smallest singular value of P_N(tau).

    The basis e^{inx} is orthonormal for the normalised inner product, so this is the
    L^2 -> L^2 norm of the truncated resolvent.

    Raises:
        NearResonanceError: If sigma_min < 1e-14.
    """
    norm = _inverse_norm(pencil.matrix(tau), tau)
    return ResolventSample(tau=complex(tau), norm=norm, N=pencil.N, flagged=is_unreliable(tau, pencil.N))


def semiclassical_norm(
    profile: DampingProfile,
    h: float,
    z: complex,
    N: int = DEFAULT_MODES,
    nu: Optional[float] = None,
) -> float:
    """
    ||P_N(h, z)^{-1}|| for P(h, z) = h|D| - i sqrt(h) z chi - z^2, computed directly.

    Since P(h, z) = h P(z / sqrt(h)), the result equals resolvent_norm(z / sqrt(h)) / h.

    Raises:
        FracwaveError: If h is not positive.
        NearResonanceError: At or near a resonance.
    """
    if not h > 0:
        raise FracwaveError(f"Semiclassical parameter must be positive, got {h}")
    pencil = build_pencil(profile, N, nu)
    return _inverse_norm(pencil.semiclassical_matrix(h, z), z / np.sqrt(h))


def semiclassical_sweep(
    profile: DampingProfile,
    z: complex,
    hs: Sequence[float],
    N: int = DEFAULT_MODES,
    nu: Optional[float] = None,
) -> List[Tuple[float, float]]:
    """Rows (h, h ||P_N(h, z)^{-1}||) along a sequence of semiclassical parameters."""
    return [(float(h), float(h) * semiclassical_norm(profile, h, z, N, nu)) for h in hs]


class SweepConfig(BaseModel):
    """
    A real-axis resolvent sweep.

    Attributes:
        tau_min, tau_max: Window of real tau
        steps: Number of samples
        N: Truncation order
        damping: Damping profile
        nu: Optional amplitude overriding the profile's own
        scale: physical (||P_N(tau)^{-1}||) or semiclassical (h ||P_N(h, 1)^{-1}||, h = 1/tau^2)
        log_grid: Space the samples geometrically
        allow_unreliable: Permit windows with tau_max^2 > N/2
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid", frozen=True)

    tau_min: float
    tau_max: float
    steps: int = Field(default=DEFAULT_SWEEP_STEPS, ge=2)
    N: int = Field(default=DEFAULT_MODES, ge=1)
    damping: InstanceOf[DampingProfile]
    nu: Optional[float] = Field(default=None, ge=0)
    scale: Literal["physical", "semiclassical"] = "physical"
    log_grid: bool = False
    allow_unreliable: bool = False

    @model_validator(mode="after")
    def check_window(self) -> "SweepConfig":
        if not self.tau_min < self.tau_max:
            raise ValueError(f"tau_min={self.tau_min} must be below tau_max={self.tau_max}")
        if (self.log_grid or self.scale == "semiclassical") and self.tau_min <= 0:
            raise ValueError("log-spaced and semiclassical sweeps need tau_min > 0")
        if is_unreliable(self.tau_max, self.N) and not self.allow_unreliable:
            raise ValueError(
                f"tau_max^2 = {self.tau_max ** 2:.4g} exceeds N/2 = {self.N / 2}; raise N or set allow_unreliable"
            )
        return self

    def taus(self) -> np.ndarray:
        if self.log_grid:
            return np.geomspace(self.tau_min, self.tau_max, self.steps)
        return np.linspace(self.tau_min, self.tau_max, self.steps)


@dataclass(frozen=True)
class SweepSummary:
    """
    Attributes:
        max_norm, min_norm: Extremes over samples away from resonances
        slope: Least-squares slope of log norm against log tau, None when not computable
        window: (tau_min, tau_max)
        envelope: Maximum norm over the first, middle and last third of the window
        flagged: Number of samples in the unreliable region
        near_resonance: Number of samples at or near a resonance
    """
    max_norm: float
    min_norm: float
    slope: Optional[float]
    window: Tuple[float, float]
    envelope: Tuple[float, float, float]
    flagged: int
    near_resonance: int

    @property
    def bounded(self) -> bool:
        """The envelope does not grow across the window."""
        return self.envelope[2] <= self.envelope[0]

    def to_dict(self) -> dict:
        return {
            "max_norm": self.max_norm,
            "min_norm": self.min_norm,
            "slope": self.slope,
            "window": list(self.window),
            "envelope": list(self.envelope),
            "flagged": self.flagged,
            "near_resonance": self.near_resonance,
        }


@dataclass(frozen=True)
class SweepResult:
    samples: Tuple[ResolventSample, ...]
    summary: SweepSummary


def summarize(samples: Sequence[ResolventSample], window: Tuple[float, float]) -> SweepSummary:
    taus = np.array([s.tau.real for s in samples])
    norms = np.array([s.norm for s in samples])
    finite = np.isfinite(norms)
    if not finite.any():
        raise NearResonanceError(complex(window[0]), 0.0)

    slope = None
    fit = finite & (taus > 0)
    if fit.sum() >= 2:
        slope = float(np.polyfit(np.log(taus[fit]), np.log(norms[fit]), 1)[0])

    thirds = np.array_split(np.where(finite, norms, -np.inf), 3)
    envelope = tuple(float(np.max(part)) if len(part) else float("nan") for part in thirds)
    return SweepSummary(
        max_norm=float(np.max(norms[finite])),
        min_norm=float(np.min(norms[finite])),
        slope=slope,
        window=(float(window[0]), float(window[1])),
        envelope=envelope,
        flagged=sum(s.flagged for s in samples),
        near_resonance=sum(s.near_resonance for s in samples),
    )


def sweep(config: SweepConfig) -> SweepResult:
    """
    Evaluate the resolvent norm on a grid of real tau in parallel.

    Samples keep the order of the grid. Samples at or near a resonance are recorded with an
    infinite norm and left out of the summary statistics.
    """
    pencil = build_pencil(config.damping, config.N, config.nu)
    taus = config.taus()

    def evaluate(tau: float) -> ResolventSample:
        try:
            if config.scale == "semiclassical":
                h = 1.0 / tau ** 2
                norm = h * _inverse_norm(pencil.semiclassical_matrix(h, 1.0), tau)
                return ResolventSample(tau=complex(tau), norm=norm, N=pencil.N, flagged=is_unreliable(tau, pencil.N))
            return resolvent_norm(pencil, tau)
        except NearResonanceError:
            return ResolventSample(
                tau=complex(tau), norm=float("inf"), N=pencil.N,
                flagged=is_unreliable(tau, pencil.N), near_resonance=True,
            )

    workers = sweep_workers()
    logging.info(f"Sweeping {len(taus)} values of tau on {pencil.size}x{pencil.size} pencils with {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        samples = tuple(executor.map(evaluate, taus))

    if any(s.flagged for s in samples):
        logging.warning(f"{sum(s.flagged for s in samples)} samples have tau^2 > N/2; truncation is unreliable there")
    return SweepResult(samples=samples, summary=summarize(samples, (config.tau_min, config.tau_max)))


def quasimode_ratio(
    profile: DampingProfile,
    bump: DampingProfile,
    k: int,
    nu: Optional[float] = None,
) -> float:
    """
    ||P(sqrt(k)) u_k|| / ||u_k|| for the quasimode u_k = a e^{ikx}, computed on the grid.

    P(sqrt(k)) u_k = [|D|, a] e^{ikx} - i sqrt(k) chi a e^{ikx}, so the ratio stays bounded in k
    when the bump a avoids the damping and grows like sqrt(k) when it overlaps it.

    Raises:
        FracwaveError: If k < 1.
        ResolutionError: If the grid has fewer than 8k points or the grids differ.
    """
    if k < 1:
        raise FracwaveError(f"Quasimode frequency must be at least 1, got {k}")
    profile = with_nu(profile, nu)
    spec = profile.spec
    require_same_grid(spec, bump.spec)
    if spec.M < 8 * k:
        raise ResolutionError(f"Quasimode at k={k} needs at least {8 * k} grid points, grid has {spec.M}")

    # e^{ikx} shifts the grid coefficients of a cyclically by k
    u = ModeField(spec, np.roll(to_modes(bump.samples).coeffs, k))
    applied = (
        apply_fractional_laplacian(u, 1.0).coeffs
        - k * u.coeffs
        - 1j * np.sqrt(k) * apply_multiplication(profile, u).coeffs
    )
    return float(np.linalg.norm(applied) / np.linalg.norm(u.coeffs))
