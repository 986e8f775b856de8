import numpy as np
import pytest
from numpy.testing import assert_allclose

from fracwave.common.errors import DecayFitError, FracwaveError
from fracwave.damping.profiles import custom_profile, make_profile
from fracwave.decay_analysis import (
    EXPONENTIAL,
    compensated_energy,
    default_window,
    exponential_rate,
    fit_exponent,
    fit_summary,
    predicted_exponent,
    resonance_rate,
)
from fracwave.evolution.integrator import SimulationConfig, Trajectory, integrate
from fracwave.evolution.state import initial_condition
from fracwave.resonance import ResonanceSet


def synthetic(energies, t_end=1000.0, dt=1.0):
    times = np.arange(0.0, t_end + dt / 2, dt)
    values = energies(times)
    return Trajectory(times=times, energies=values, dissipation=values[0] - values)


def power_law(p, scale=1.0):
    return lambda t: scale / np.maximum(t, 1.0) ** p


def test_default_window_is_last_decade():
    assert default_window(synthetic(power_law(2))) == (100.0, 1000.0)
    assert default_window(synthetic(power_law(2), t_end=5.0)) == (1.0, 5.0)


def test_fit_recovers_exact_power_laws():
    fit = fit_exponent(synthetic(power_law(2)))
    assert fit.exponent == pytest.approx(2.0, abs=1e-10)
    assert fit.residual < 1e-10
    assert fit.samples == 901
    assert fit.compensated_spread == pytest.approx(1.0)
    assert not fit.noise_limited

    assert fit_exponent(synthetic(power_law(3, scale=5.0))).exponent == pytest.approx(3.0, abs=1e-10)


def test_fit_tolerates_oscillating_energy():
    traj = synthetic(lambda t: (1.0 + 0.1 * np.sin(t)) / np.maximum(t, 1.0) ** 2)
    fit = fit_exponent(traj)
    assert 1.9 <= fit.exponent <= 2.1
    assert fit.compensated_spread < 10


def test_fit_is_scale_invariant():
    base = fit_exponent(synthetic(power_law(2.5)), window=(10.0, 500.0))
    scaled = fit_exponent(synthetic(power_law(2.5, scale=7.0)), window=(10.0, 500.0))
    assert scaled.exponent == pytest.approx(base.exponent, abs=1e-10)
    assert scaled.window == (10.0, 500.0)


def test_fit_rejects_bad_windows():
    traj = synthetic(power_law(2))
    with pytest.raises(DecayFitError):
        fit_exponent(traj, window=(0.5, 10.0))
    with pytest.raises(DecayFitError):
        fit_exponent(traj, window=(10.0, 10.0))
    with pytest.raises(DecayFitError):
        fit_exponent(traj, window=(10.0, 2000.0))
    with pytest.raises(DecayFitError):
        fit_exponent(traj, window=(1.0, 5.0))


def test_fit_rejects_vanished_energy_in_explicit_window():
    traj = synthetic(lambda t: np.where(t < 500, 1.0 / np.maximum(t, 1.0) ** 2, 0.0))
    with pytest.raises(DecayFitError):
        fit_exponent(traj, window=(100.0, 1000.0))


def test_fit_needs_positive_initial_energy():
    with pytest.raises(DecayFitError):
        fit_exponent(synthetic(lambda t: np.zeros_like(t)))
    with pytest.raises(DecayFitError):
        fit_exponent(synthetic(lambda t: np.zeros_like(t)), window=(100.0, 1000.0))


def test_fit_flags_energies_below_the_balance_defect():
    times = np.arange(0.0, 1000.5, 1.0)
    energies = power_law(2)(times)
    # a defect of 1e-4 E(0) at t = 1 lies above E(t) from t = 100 on
    dissipation = energies[0] - energies
    dissipation[1:] += 1e-4
    noisy = Trajectory(times=times, energies=energies, dissipation=dissipation)
    fit = fit_exponent(noisy)
    assert fit.noise_limited
    assert fit_summary(fit)["noise_limited"] is True

    assert not fit_exponent(noisy, window=(10.0, 90.0)).noise_limited


def test_default_window_drops_samples_below_floor():
    traj = synthetic(lambda t: np.where(t <= 900, 1.0 / np.maximum(t, 1.0) ** 2, 0.0))
    fit = fit_exponent(traj)
    assert fit.exponent == pytest.approx(2.0, abs=1e-10)
    assert fit.samples == 801


def test_predicted_exponents():
    localized = predicted_exponent(make_profile("chi3"))
    assert localized.rate == 2.0
    assert not localized.approached_from_below

    degenerate = predicted_exponent(make_profile("chi1"))
    assert degenerate.rate == pytest.approx(3.0)
    assert degenerate.approached_from_below
    assert degenerate.classification == "finite-degeneracy"

    assert predicted_exponent(make_profile("chi2")).rate == EXPONENTIAL
    assert predicted_exponent(make_profile("zero")).rate == 0.0


def test_predicted_exponent_needs_determinate_zeros():
    profile = custom_profile(lambda x: np.abs(x - np.pi))
    with pytest.raises(DecayFitError):
        predicted_exponent(profile)


def test_compensated_energy():
    rows = compensated_energy(synthetic(power_law(2)), 2.0)
    assert rows[0, 0] == 1.0
    assert_allclose(rows[:, 1], 1.0)
    with pytest.raises(DecayFitError):
        compensated_energy(synthetic(power_law(2)), -1.0)


def test_exponential_rate():
    traj = synthetic(lambda t: 3.0 * np.exp(-0.6 * t), t_end=20.0, dt=0.5)
    rows = exponential_rate(traj)
    assert rows[0, 0] == 0.5
    assert_allclose(rows[:, 1], 0.3, rtol=1e-12)


def test_resonance_rate_uses_slowest_nonzero_member():
    resonances = ResonanceSet(N=1, nu=0.1, values=np.array([0.0, 1 - 0.2j, -1 - 0.2j, 2 - 0.05j]))
    assert resonance_rate(resonances) == pytest.approx(0.05)
    with pytest.raises(FracwaveError):
        resonance_rate(ResonanceSet(N=1, nu=0.0, values=np.zeros(2, dtype=complex)))


def test_fit_summary():
    fit = fit_exponent(synthetic(power_law(2)))
    summary = fit_summary(fit, predicted_exponent(make_profile("chi3")))
    assert summary["window"] == [100.0, 1000.0]
    assert summary["predicted"] == 2.0
    assert summary["classification"] == "localized"
    assert fit_summary(fit)["predicted"] is None


def simulate(kind, t_end):
    config = SimulationConfig(damping=make_profile(kind), t_end=t_end)
    return integrate(initial_condition("localized-highfreq"), config)


@pytest.mark.slow
def test_localized_damping_decays_at_least_like_inverse_square():
    trajectory = simulate("chi3", 1000.0)
    assert np.max(trajectory.conservation_defect) <= 1e-5
    fit = fit_exponent(trajectory, window=(100.0, 1000.0))
    assert fit.exponent >= 1.7
    compensated = compensated_energy(trajectory, 2.0)
    window = (compensated[:, 0] >= 100.0) & (compensated[:, 0] <= 1000.0)
    assert compensated[window][-1, 1] < compensated[window][0, 1]


@pytest.mark.slow
def test_degenerate_damping_fit_is_fast_or_flagged():
    trajectory = simulate("chi1", 2000.0)
    assert np.max(trajectory.conservation_defect) <= 1e-5
    fit = fit_exponent(trajectory, window=(200.0, 2000.0))
    assert fit.noise_limited or fit.exponent >= 2.5
