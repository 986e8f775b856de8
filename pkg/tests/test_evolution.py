import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from fracwave.common.errors import FracwaveError, IntegrationError, ResolutionError
from fracwave.common.interfaces import IntegrationContext
from fracwave.damping.profiles import make_profile
from fracwave.evolution import integrator
from fracwave.evolution.dampers import BUILTIN_DAMPERS, HalfWaveDamper, MultiplicativeDamper, build_damper
from fracwave.evolution.integrator import SimulationConfig, Trajectory, integrate, rhs_eval
from fracwave.evolution.state import StateVector, energy, initial_condition
from fracwave.spectral_core import GridField, GridSpec, ModeField, to_grid, to_modes


def state_from(spec, u, v):
    return StateVector(to_modes(GridField(spec, u)), to_modes(GridField(spec, v)))


def test_rhs_without_damping():
    spec = GridSpec(32)
    s = state_from(spec, np.sin(spec.points), np.zeros(32))
    config = SimulationConfig(damping=make_profile("zero", spec=spec), t_end=1.0)
    derivative = rhs_eval(s, config)
    assert_allclose(derivative.u.coeffs, 0.0, atol=1e-15)
    assert_allclose(to_grid(derivative.v).values, -np.sin(spec.points), atol=1e-14)


def test_rhs_with_constant_damping():
    spec = GridSpec(32)
    s = state_from(spec, np.zeros(32), np.ones(32))
    config = SimulationConfig(damping=make_profile("constant", 0.3, spec), t_end=1.0)
    derivative = rhs_eval(s, config)
    assert_allclose(to_grid(derivative.u).values, 1.0, atol=1e-14)
    assert_allclose(to_grid(derivative.v).values, -0.3, atol=1e-14)


def test_rhs_half_wave_damping_acts_as_derivative():
    spec = GridSpec(32)
    v = ModeField.from_modes({4: 1.0}, spec)
    s = StateVector(ModeField(spec, np.zeros(32)), v)
    config = SimulationConfig(damping=make_profile("constant", 1.0, spec), damping_kind="half-wave", t_end=1.0)
    derivative = rhs_eval(s, config)
    assert derivative.v.coefficient(4) == pytest.approx(-4.0, abs=1e-13)


def test_dampers_registry():
    assert BUILTIN_DAMPERS == {"multiplicative": MultiplicativeDamper, "half-wave": HalfWaveDamper}
    spec = GridSpec(16)
    context = IntegrationContext.build(spec, np.ones(16))
    with pytest.raises(FracwaveError):
        build_damper("viscous", context)


def test_dissipation_rate_of_constant_damping():
    spec = GridSpec(64)
    chi = make_profile("constant", 0.5, spec)
    damper = build_damper("multiplicative", IntegrationContext.build(spec, chi.samples.values))
    v = to_modes(GridField(spec, np.cos(spec.points)))
    damped, rate = damper.evaluate(v.coeffs)
    # 2 * 0.5 * int cos^2 = pi
    assert rate == pytest.approx(np.pi, rel=1e-13)
    assert_allclose(damped, 0.5 * v.coeffs, atol=1e-15)


def test_half_wave_dissipation_weights_modes_by_frequency():
    spec = GridSpec(64)
    context = IntegrationContext.build(spec, make_profile("constant", 0.5, spec).samples.values)
    v = ModeField.from_modes({3: 0.5, -3: 0.5}, spec)
    damped, rate = build_damper("half-wave", context).evaluate(v.coeffs)
    # 2 * 0.5 * int 3 cos^2(3x) = 3pi
    assert rate == pytest.approx(3 * np.pi, rel=1e-13)
    assert damped[3] == pytest.approx(0.5 * 3 * 0.5, abs=1e-14)
    _, constant_rate = build_damper("half-wave", context).evaluate(ModeField.from_modes({0: 1.0}, spec).coeffs)
    assert constant_rate == 0.0


def test_energy_examples():
    spec = GridSpec(64)
    zero = np.zeros(64)
    assert energy(state_from(spec, np.sin(spec.points), zero)) == pytest.approx(np.pi, rel=1e-13)
    assert energy(state_from(spec, np.full(64, 7.0), zero)) == pytest.approx(0.0, abs=1e-12)
    assert energy(state_from(spec, zero, np.cos(spec.points))) == pytest.approx(np.pi, rel=1e-13)


def test_sine_initial_condition():
    s = initial_condition("sine", GridSpec(64))
    assert s.u.coefficient(1) == pytest.approx(-0.5j, abs=1e-15)
    assert s.u.coefficient(-1) == pytest.approx(0.5j, abs=1e-15)
    assert_allclose(s.v.coeffs, 0.0)


def test_custom_modes_initial_condition():
    s = initial_condition("custom-modes", GridSpec(32), {3: 1.0})
    assert s.u.coefficient(3) == 1.0
    assert np.count_nonzero(s.u.coeffs) == 1


def test_localized_initial_condition_is_a_wave_packet_near_ten():
    spec = GridSpec(512)
    s = initial_condition("localized-highfreq", spec)
    assert_allclose(s.v.coeffs, 0.0)
    power = np.abs(s.u.coeffs) ** 2
    n = np.abs(spec.wavenumbers)
    assert 9 <= n[np.argmax(power)] <= 12
    assert power[(n >= 5) & (n <= 15)].sum() > 0.5 * power.sum()
    # supported around x = 0, away from chi3
    values = to_grid(s.u).values
    assert np.max(np.abs(values[np.abs(spec.points - np.pi) < 1.0])) < 1e-12


@pytest.mark.parametrize("name, modes", [("gaussian", None), ("custom-modes", None), ("custom-modes", {})])
def test_initial_condition_errors(name, modes):
    with pytest.raises(FracwaveError):
        initial_condition(name, GridSpec(32), modes)


def test_state_components_share_a_grid():
    with pytest.raises(ResolutionError):
        StateVector(ModeField(GridSpec(16), np.zeros(16)), ModeField(GridSpec(32), np.zeros(32)))


def test_simulation_config_validation():
    chi = make_profile("chi3", spec=GridSpec(64))
    with pytest.raises(ValidationError):
        SimulationConfig(damping=chi, t_end=0.0)
    with pytest.raises(ValidationError):
        SimulationConfig(damping=chi, t_end=10.0, rel_tol=1e-2)
    with pytest.raises(ValidationError):
        SimulationConfig(damping=chi, t_end=10.0, abs_tol=0.0)
    with pytest.raises(ValidationError):
        SimulationConfig(damping=chi, t_end=1.0, sample_dt=2.0)
    with pytest.raises(ValidationError):
        SimulationConfig(damping=chi, t_end=1.0, damping_kind="viscous")
    with pytest.raises(ValidationError):
        SimulationConfig(damping=chi, t_end=1.0, method="rk4")
    with pytest.raises(ValidationError):
        SimulationConfig(damping="chi3", t_end=1.0)


def test_undamped_cosine_is_conserved_and_returns_inverted():
    spec = GridSpec(64)
    s0 = initial_condition("custom-modes", spec, {1: 0.5, -1: 0.5})
    config = SimulationConfig(
        damping=make_profile("zero", spec=spec), t_end=np.pi, sample_dt=np.pi / 10, store_snapshots=True,
    )
    trajectory = integrate(s0, config)
    assert len(trajectory.times) == 11
    assert trajectory.times[-1] == pytest.approx(np.pi)
    assert_allclose(to_grid(trajectory.snapshots[-1].u).values, -np.cos(spec.points), atol=1e-6)
    assert np.max(trajectory.conservation_defect) < 1e-6


def test_undamped_energy_is_constant_over_long_runs():
    spec = GridSpec(16)
    s0 = initial_condition("custom-modes", spec, {1: 0.5, -1: 0.5})
    trajectory = integrate(s0, SimulationConfig(damping=make_profile("zero", spec=spec), t_end=100.0))
    assert np.all(np.diff(trajectory.times) > 0)
    drift = np.abs(trajectory.energies - trajectory.energies[0]) / trajectory.energies[0]
    assert np.max(drift) <= 1e-6


def test_undamped_wave_packet_is_conserved():
    spec = GridSpec(512)
    s0 = initial_condition("localized-highfreq", spec)
    trajectory = integrate(s0, SimulationConfig(damping=make_profile("zero", spec=spec), t_end=100.0))
    drift = np.abs(trajectory.energies - trajectory.energies[0]) / trajectory.energies[0]
    assert np.max(drift) <= 1e-6


def test_absolute_tolerance_applies_to_grid_values(monkeypatch):
    seen = {}

    class RecordingSolver(integrator.RK45):
        def __init__(self, fun, t0, y0, t_bound, rtol, atol):
            seen["atol"], seen["rtol"] = atol, rtol
            super().__init__(fun, t0, y0, t_bound, rtol=rtol, atol=atol)

    monkeypatch.setattr(integrator, "RK45", RecordingSolver)
    spec = GridSpec(128)
    config = SimulationConfig(damping=make_profile("zero", spec=spec), t_end=1.0, abs_tol=1e-8, rel_tol=1e-7)
    integrate(initial_condition("sine", spec), config)
    assert seen["atol"] == pytest.approx(1e-8 / 128)
    assert seen["rtol"] == 1e-7


@pytest.mark.parametrize("kind", ["multiplicative", "half-wave"])
def test_dissipation_balance(kind):
    spec = GridSpec(256)
    s0 = initial_condition("localized-highfreq", spec)
    config = SimulationConfig(damping=make_profile("chi3", 0.25, spec), damping_kind=kind, t_end=10.0)
    trajectory = integrate(s0, config)
    assert trajectory.energies[-1] < trajectory.energies[0]
    balance = trajectory.energies[-1] - trajectory.energies[0] + trajectory.dissipation[-1]
    assert abs(balance) / trajectory.energies[0] <= 1e-6
    assert np.all(np.diff(trajectory.energies) <= 1e-7 * trajectory.energies[0])


def test_mean_mode_carries_no_energy():
    spec = GridSpec(64)
    chi = make_profile("chi2", 1.0, spec)
    config = SimulationConfig(damping=chi, t_end=5.0)
    with_mean = integrate(initial_condition("custom-modes", spec, {0: 1.0, 2: 0.5, -2: 0.5}), config)
    without = integrate(initial_condition("custom-modes", spec, {2: 0.5, -2: 0.5}), config)
    assert_allclose(with_mean.energies, without.energies, rtol=1e-6)


def test_tighter_tolerances_reduce_the_error():
    spec = GridSpec(64)
    s0 = initial_condition("sine", spec)
    chi = make_profile("chi1", 0.25, spec)

    def energies(tol):
        return integrate(s0, SimulationConfig(damping=chi, t_end=5.0, rel_tol=tol, abs_tol=tol)).energies

    reference = energies(1e-12)
    loose = np.max(np.abs(energies(1e-5) - reference))
    tight = np.max(np.abs(energies(1e-8) - reference))
    assert tight < loose


def test_grid_mismatch_is_rejected():
    config = SimulationConfig(damping=make_profile("chi3", spec=GridSpec(128)), t_end=1.0)
    with pytest.raises(ResolutionError):
        integrate(initial_condition("sine", GridSpec(64)), config)


def test_solver_failure_reports_the_time_reached(monkeypatch):
    class FailingSolver:
        def __init__(self, fun, t0, y0, t_bound, rtol, atol):
            self.status = "running"
            self.t = t0
            self.y = y0

        def step(self):
            self.status = "failed"
            self.t = 0.5
            return "Required step size is less than spacing between numbers."

    monkeypatch.setattr(integrator, "RK45", FailingSolver)
    spec = GridSpec(32)
    config = SimulationConfig(damping=make_profile("chi3", spec=spec), t_end=2.0)
    with pytest.raises(IntegrationError) as e:
        integrate(initial_condition("sine", spec), config)
    assert e.value.time_reached == 0.5


def test_trajectory_csv_round_trip(tmp_path):
    path = tmp_path / "traj.csv"
    path.write_text("# fracwave 0.1.0 simulate abc\nt,energy,dissipation\n0,2,0\n1,1.5,0.5\n")
    trajectory = Trajectory.load_csv(str(path))
    assert_allclose(trajectory.times, [0, 1])
    assert_allclose(trajectory.energies, [2, 1.5])
    assert_allclose(trajectory.conservation_defect, 0.0)


@pytest.mark.slow
def test_dissipation_balance_over_long_runs():
    s0 = initial_condition("localized-highfreq")
    trajectory = integrate(s0, SimulationConfig(damping=make_profile("chi3"), t_end=50.0))
    assert np.max(trajectory.conservation_defect) <= 1e-5
