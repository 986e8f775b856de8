import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from fracwave.common.errors import FracwaveError, NearResonanceError, ResolutionError
from fracwave.damping.profiles import bump_function, custom_profile, make_profile
from fracwave.resolvent import (
    ResolventSample,
    SweepConfig,
    is_unreliable,
    quasimode_ratio,
    resolvent_norm,
    semiclassical_norm,
    semiclassical_sweep,
    summarize,
    sweep,
)
from fracwave.resonance import build_pencil
from fracwave.spectral_core import GridSpec


@pytest.fixture(autouse=True)
def two_workers(monkeypatch):
    monkeypatch.setenv("FRACWAVE_THREADS", "2")


def zero_pencil(N=4):
    return build_pencil(make_profile("zero", spec=GridSpec(64)), N=N)


def test_undamped_resolvent_norm():
    sample = resolvent_norm(zero_pencil(), 0.5)
    assert sample.norm == pytest.approx(4.0)
    assert sample.N == 4
    assert not sample.flagged
    assert not sample.near_resonance


def test_undamped_resolvent_is_singular_at_modes():
    with pytest.raises(NearResonanceError) as info:
        resolvent_norm(zero_pencil(), 1.0)
    assert info.value.tau == 1.0
    assert info.value.sigma_min < 1e-14


def test_unreliable_region():
    assert not is_unreliable(2.0, 8)
    assert is_unreliable(2.1, 8)
    assert resolvent_norm(zero_pencil(N=4), 1.7).flagged


@pytest.mark.parametrize("h", [1.0, 0.1, 0.01])
@pytest.mark.parametrize("z", [0.9, 1.05, 1.3])
def test_semiclassical_scaling_identity(h, z):
    profile = make_profile("chi1")
    direct = semiclassical_norm(profile, h, z, N=16)
    physical = resolvent_norm(build_pencil(profile, N=16), z / np.sqrt(h)).norm
    assert direct == pytest.approx(physical / h, rel=1e-10)


def test_semiclassical_sweep_rows():
    profile = make_profile("chi3")
    pencil = build_pencil(profile, N=32)
    hs = [1.0 / k ** 2 for k in range(2, 7)]
    rows = semiclassical_sweep(profile, 1.0, hs, N=32)
    assert [h for h, _ in rows] == hs
    for (h, value) in rows:
        assert value == pytest.approx(resolvent_norm(pencil, 1.0 / np.sqrt(h)).norm, rel=1e-9)
    with pytest.raises(FracwaveError):
        semiclassical_norm(profile, 0.0, 1.0)


@pytest.mark.parametrize("kind", ["chi1", "chi2", "chi3"])
def test_resolvent_norm_converges_in_truncation(kind):
    profile = make_profile(kind)
    coarse = resolvent_norm(build_pencil(profile, N=64), 2.5).norm
    fine = resolvent_norm(build_pencil(profile, N=128), 2.5).norm
    assert coarse == pytest.approx(fine, rel=0.01)


def test_resolvent_norm_at_high_frequency_is_resolved():
    profile = make_profile("chi3", spec=GridSpec(1024))
    coarse = resolvent_norm(build_pencil(profile, N=128), 8.0).norm
    fine = resolvent_norm(build_pencil(profile, N=256), 8.0).norm
    assert coarse == pytest.approx(fine, rel=0.05)


def test_sweep_config_validation():
    damping = make_profile("chi3")
    with pytest.raises(ValidationError):
        SweepConfig(tau_min=3.0, tau_max=2.0, damping=damping)
    with pytest.raises(ValidationError):
        SweepConfig(tau_min=0.0, tau_max=2.0, damping=damping, log_grid=True)
    with pytest.raises(ValidationError):
        SweepConfig(tau_min=0.0, tau_max=2.0, damping=damping, scale="semiclassical")
    with pytest.raises(ValidationError):
        SweepConfig(tau_min=1.0, tau_max=5.0, N=12, damping=damping)
    with pytest.raises(ValidationError):
        SweepConfig(tau_min=1.0, tau_max=2.0, steps=1, damping=damping)
    with pytest.raises(ValidationError):
        SweepConfig(tau_min=1.0, tau_max=2.0, damping="chi3")

    config = SweepConfig(tau_min=1.0, tau_max=5.0, N=12, damping=damping, allow_unreliable=True)
    assert config.steps == 200
    assert_allclose(SweepConfig(tau_min=1.0, tau_max=2.0, steps=3, damping=damping, log_grid=True).taus(),
                    [1.0, np.sqrt(2.0), 2.0])


def test_undamped_sweep_peaks_next_to_mode():
    config = SweepConfig(tau_min=1.1, tau_max=1.4, steps=31, N=4, damping=make_profile("zero", spec=GridSpec(64)))
    result = sweep(config)
    norms = [s.norm for s in result.samples]
    assert len(norms) == 31
    assert_allclose([s.tau.real for s in result.samples], config.taus())
    assert np.argmax(norms) == 30
    assert result.summary.max_norm == pytest.approx(1.0 / (2.0 - 1.96))
    assert result.summary.window == (1.1, 1.4)
    assert result.summary.flagged == 0
    assert not result.summary.bounded


def test_sweep_records_near_resonances():
    config = SweepConfig(
        tau_min=0.5, tau_max=1.5, steps=3, N=4,
        damping=make_profile("zero", spec=GridSpec(64)), allow_unreliable=True,
    )
    result = sweep(config)
    assert result.samples[1].near_resonance
    assert result.samples[1].norm == float("inf")
    assert result.summary.near_resonance == 1
    assert result.summary.flagged == 1
    assert result.summary.max_norm == pytest.approx(4.0)
    assert np.isfinite(result.summary.slope)


def test_semiclassical_sweep_matches_physical_sweep():
    damping = make_profile("chi1")
    physical = sweep(SweepConfig(tau_min=1.2, tau_max=3.0, steps=10, N=24, damping=damping))
    semiclassical = sweep(
        SweepConfig(tau_min=1.2, tau_max=3.0, steps=10, N=24, damping=damping, scale="semiclassical")
    )
    assert_allclose(
        [s.norm for s in semiclassical.samples],
        [s.norm for s in physical.samples],
        rtol=1e-9,
    )


def test_summary_of_unusable_sweep():
    samples = [ResolventSample(tau=1.0, norm=float("inf"), N=4, flagged=False, near_resonance=True)]
    with pytest.raises(NearResonanceError):
        summarize(samples, (1.0, 1.0))


def test_summary_to_dict():
    samples = [ResolventSample(tau=t, norm=n, N=8, flagged=False) for t, n in [(1.0, 3.0), (2.0, 2.0), (4.0, 1.0)]]
    summary = summarize(samples, (1.0, 4.0))
    record = summary.to_dict()
    assert record["envelope"] == [3.0, 2.0, 1.0]
    assert record["slope"] == pytest.approx(-np.log(3.0) / np.log(4.0), rel=0.1)
    assert summary.bounded


def test_quasimode_of_undamped_plane_wave_is_exact():
    spec = GridSpec(256)
    ones = custom_profile(np.ones(spec.M), spec)
    assert quasimode_ratio(make_profile("zero", spec=spec), ones, 16) == pytest.approx(0.0, abs=1e-12)


def test_quasimode_away_from_damping_stays_bounded():
    spec = GridSpec(512)
    chi = make_profile("chi3", spec=spec)
    bump = bump_function(0.0, 0.5, spec)
    assert quasimode_ratio(chi, bump, 64) / quasimode_ratio(chi, bump, 16) < 2.0


def test_quasimode_bounds_resolvent_from_below():
    spec = GridSpec(512)
    chi = make_profile("chi3", spec=spec)
    ratio = quasimode_ratio(chi, bump_function(0.0, 0.5, spec), 16)
    assert resolvent_norm(build_pencil(chi, N=128), 4.0).norm >= 1.0 / ratio


def test_quasimode_under_damping_grows():
    spec = GridSpec(8192)
    chi = make_profile("chi3", spec=spec)
    bump = bump_function(np.pi, 0.5, spec)
    assert quasimode_ratio(chi, bump, 1024) / quasimode_ratio(chi, bump, 64) > 1.5


def test_quasimode_errors():
    spec = GridSpec(512)
    chi = make_profile("chi3", spec=spec)
    bump = bump_function(0.0, 0.5, spec)
    with pytest.raises(ResolutionError):
        quasimode_ratio(chi, bump, 100)
    with pytest.raises(FracwaveError):
        quasimode_ratio(chi, bump, 0)
    with pytest.raises(ResolutionError):
        quasimode_ratio(chi, bump_function(0.0, 0.5, GridSpec(256)), 4)


@pytest.mark.slow
def test_localized_damping_resolvent_stays_bounded():
    damping = make_profile("chi3", spec=GridSpec(1024))
    result = sweep(SweepConfig(tau_min=5.0, tau_max=12.0, N=256, damping=damping, allow_unreliable=True))
    envelope = result.summary.envelope
    assert envelope[2] <= 1.25 * envelope[0]


@pytest.mark.slow
def test_degenerate_damping_resolvent_decays_slowly():
    damping = make_profile("chi1", spec=GridSpec(1024))
    result = sweep(SweepConfig(tau_min=6.0, tau_max=15.0, N=256, damping=damping, allow_unreliable=True))
    assert -0.6 <= result.summary.slope <= -0.1
