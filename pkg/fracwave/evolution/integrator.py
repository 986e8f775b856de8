"""
Adaptive time integration of u_tt + |D| u + B u_t = 0 on the circle.

The packed state [u_hat, v_hat, q] is advanced by an embedded Runge-Kutta 5(4) pair, where q
accumulates the dissipated energy so that E(t) + q(t) stays equal to E(0).
"""
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import logging
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, InstanceOf, field_validator, model_validator
from scipy.integrate import RK45

from fracwave.common.errors import ConfigError, IntegrationError
from fracwave.common.interfaces import IntegrationContext
from fracwave.constants import DEFAULT_ABS_TOL, DEFAULT_REL_TOL, DEFAULT_SAMPLE_DT, MAX_TOLERANCE
from fracwave.damping.profiles import DampingProfile
from fracwave.evolution.dampers import build_damper
from fracwave.evolution.recorders import EnergyRecorder, SnapshotRecorder
from fracwave.evolution.state import StateVector
from fracwave.io.artifacts import read_table
from fracwave.spectral_core import GridSpec, ModeField, apply_fractional_laplacian, require_same_grid


class SimulationConfig(BaseModel):
    """
    Settings of one simulation run.

    Attributes:
        damping: Damping profile chi; its grid is the grid of the run.
        damping_kind: multiplicative (chi v) or half-wave (|D|^{1/2} chi |D|^{1/2} v)
        t_end: Final time, positive
        rel_tol: Relative tolerance of the step controller, in (0, 1e-3]
        abs_tol: Absolute tolerance of the step controller on grid values, in (0, 1e-3]
        sample_dt: Spacing of the recorded samples
        store_snapshots: Keep the full state at every sample
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid", frozen=True)

    damping: InstanceOf[DampingProfile]
    damping_kind: Literal["multiplicative", "half-wave"] = "multiplicative"
    t_end: float = Field(gt=0)
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    sample_dt: float = Field(default=DEFAULT_SAMPLE_DT, gt=0)
    store_snapshots: bool = False

    @field_validator("rel_tol", "abs_tol")
    @classmethod
    def check_tolerance(cls, value: float) -> float:
        if not 0 < value <= MAX_TOLERANCE:
            raise ValueError(f"tolerance must lie in (0, {MAX_TOLERANCE}], got {value}")
        return value

    @model_validator(mode="after")
    def check_sampling(self) -> "SimulationConfig":
        if self.sample_dt > self.t_end:
            raise ValueError(f"sample_dt={self.sample_dt} exceeds t_end={self.t_end}")
        return self

    @property
    def spec(self) -> GridSpec:
        return self.damping.spec


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Samples of a run at t_k = k * sample_dt.

    Attributes:
        times: Sample times, starting at 0
        energies: E(t_k)
        dissipation: Accumulated dissipation 2 int_0^{t_k} int chi |w|^2 dx dt
        snapshots: Full states, when requested
        steps: Accepted integrator steps
    """
    times: np.ndarray
    energies: np.ndarray
    dissipation: np.ndarray
    snapshots: Optional[Tuple[StateVector, ...]] = None
    steps: int = 0

    @property
    def conservation_defect(self) -> np.ndarray:
        """|E(t) + dissipation(t) - E(0)| relative to E(0)."""
        reference = self.energies[0] if self.energies[0] > 0 else 1.0
        return np.abs(self.energies + self.dissipation - self.energies[0]) / reference

    def rows(self):
        return zip(self.times, self.energies, self.dissipation)

    @classmethod
    def load_csv(cls, path: str) -> "Trajectory":
        """
        Read a trajectory written by the simulate command.

        Raises:
            ConfigError: If the file is missing or lacks the t, energy, dissipation columns.
        """
        names, data = read_table(path, min_columns=3)
        if names and names[:3] != ["t", "energy", "dissipation"]:
            raise ConfigError(f"Trajectory file '{path}' must have columns t,energy,dissipation, got {names}")
        return cls(times=data[:, 0], energies=data[:, 1], dissipation=data[:, 2])


def _packed_rhs(context: IntegrationContext, damping_kind: str):
    damper = build_damper(damping_kind, context)
    spec = context.spec
    M = spec.M

    def fun(t: float, y: np.ndarray) -> np.ndarray:
        u_hat, v_hat = y[:M], y[M:2 * M]
        damped, rate = damper.evaluate(v_hat)
        out = np.empty_like(y)
        out[:M] = v_hat
        out[M:2 * M] = -apply_fractional_laplacian(ModeField(spec, u_hat), 1.0).coeffs - damped
        out[2 * M] = rate
        return out

    return fun


def rhs_eval(state: StateVector, config: SimulationConfig) -> StateVector:
    """
    The right-hand side (v, -|D|u - Bv) of the first-order system.

    Raises:
        ResolutionError: If the state and the damping live on different grids.
    """
    require_same_grid(state.spec, config.spec)
    context = IntegrationContext.build(config.spec, config.damping.samples.values)
    derivative = _packed_rhs(context, config.damping_kind)(0.0, state.pack())
    return StateVector.unpack(derivative, config.spec)


def integrate(initial: StateVector, config: SimulationConfig) -> Trajectory:
    """
    Integrate from t = 0 to t_end and sample energy and dissipation every sample_dt.

    Samples are taken from the dense output of each accepted step, so they do not constrain
    the step sizes chosen by the controller.

    Args:
        initial: State at t = 0, on the grid of the damping profile.
        config: Simulation settings.

    Returns:
        Trajectory of the sampled run.

    Raises:
        ResolutionError: On a grid mismatch.
        IntegrationError: If the controller fails or the state stops being finite.
    """
    require_same_grid(initial.spec, config.spec)
    context = IntegrationContext.build(config.spec, config.damping.samples.values)
    fun = _packed_rhs(context, config.damping_kind)
    recorder = SnapshotRecorder(context) if config.store_snapshots else EnergyRecorder(context)

    count = int(np.floor(config.t_end / config.sample_dt + 1e-9))
    sample_times = np.minimum(config.sample_dt * np.arange(count + 1), config.t_end)
    y0 = initial.pack()
    recorder.record(0.0, y0)
    upcoming = 1

    # coefficients are stored at 1/M scale; abs_tol bounds errors of grid values
    solver = RK45(fun, 0.0, y0, config.t_end, rtol=config.rel_tol, atol=config.abs_tol / config.spec.M)
    steps = 0
    logging.info(
        f"Integrating {config.damping.kind} ({config.damping_kind}) on {config.spec.M} points "
        f"to t={config.t_end} with rtol={config.rel_tol}"
    )
    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            raise IntegrationError(f"Integration failed: {message or 'step size underflow'}", solver.t)
        if not np.all(np.isfinite(solver.y)):
            raise IntegrationError("Integration produced a non-finite state", solver.t)
        steps += 1
        if upcoming <= count and sample_times[upcoming] <= solver.t:
            dense = solver.dense_output()
            while upcoming <= count and sample_times[upcoming] <= solver.t:
                recorder.record(sample_times[upcoming], dense(sample_times[upcoming]))
                upcoming += 1

    logging.info(f"Reached t={solver.t} after {steps} steps, {len(recorder.times)} samples")
    snapshots = tuple(recorder.snapshots) if isinstance(recorder, SnapshotRecorder) else None
    return Trajectory(
        times=np.array(recorder.times),
        energies=np.array(recorder.energies),
        dissipation=np.array(recorder.dissipation),
        snapshots=snapshots,
        steps=steps,
    )
