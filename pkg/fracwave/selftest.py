"""Fast property checks of the numerical core, run by the selftest command."""
from typing import Callable, List, Tuple

import logging
import numpy as np

from fracwave.damping.profiles import custom_profile, make_profile
from fracwave.evolution.integrator import SimulationConfig, integrate
from fracwave.evolution.state import initial_condition
from fracwave.resolvent import resolvent_norm, semiclassical_norm
from fracwave.resonance import (
    build_pencil,
    exact_constant_resonances,
    match_resonances,
    pencil_resonances,
    transport_resonances,
)
from fracwave.spectral_core import GridField, GridSpec, ModeField, to_modes

CheckResult = Tuple[str, bool, str]


def check_fourier_convention(seed: int) -> CheckResult:
    spec = GridSpec(64)
    coeffs = to_modes(GridField(spec, np.sin(spec.points)))
    error = max(abs(coeffs.coefficient(1) + 0.5j), abs(coeffs.coefficient(-1) - 0.5j))
    return "fourier convention", error < 1e-14, f"|sin_hat(1) + i/2| = {error:.1e}"


def check_undamped_pencil(seed: int) -> CheckResult:
    values = pencil_resonances(build_pencil(make_profile("zero", spec=GridSpec(64)), 2)).values
    nonzero = values[np.abs(values) > 1e-6]
    expected = np.repeat([-np.sqrt(2.0), -1.0, 1.0, np.sqrt(2.0)], 2)
    if len(nonzero) != len(expected):
        return "undamped pencil", False, f"{len(nonzero)} nonzero resonances, expected {len(expected)}"
    error = float(max(np.max(np.abs(np.sort(nonzero.real) - expected)), np.max(np.abs(nonzero.imag))))
    return "undamped pencil", error < 1e-10, f"max error {error:.1e}"


def check_constant_pencil(seed: int) -> CheckResult:
    pencil = pencil_resonances(build_pencil(make_profile("constant", 0.5, GridSpec(64)), 6))
    report = match_resonances(pencil, exact_constant_resonances(0.5, 6))
    ok = report.max_distance < 1e-10 and not report.unpaired_a
    return "constant damping pencil", ok, f"max distance {report.max_distance:.1e}"


def check_transport_lines(seed: int) -> CheckResult:
    worst = 0.0
    for kind in ("chi1", "chi2", "chi3"):
        profile = make_profile(kind, spec=GridSpec(64))
        mean = profile.fourier.coefficient(0).real
        for h in (1.0, 0.1, 0.01):
            values = transport_resonances(profile, h).values
            line = -mean * np.sqrt(h) / 2.0
            worst = max(worst, float(np.max(np.minimum(np.abs(values.real), np.abs(values.imag - line)))))
    return "transport lines", worst < 1e-12, f"max offset {worst:.1e}"


def check_scaling_identity(seed: int) -> CheckResult:
    profile = make_profile("chi1", 0.25, GridSpec(64))
    pencil = build_pencil(profile, 12)
    h, z = 0.01, 1.0
    direct = semiclassical_norm(profile, h, z, 12) * h
    rescaled = resolvent_norm(pencil, z / np.sqrt(h)).norm
    error = abs(direct - rescaled) / rescaled
    return "semiclassical scaling", error < 1e-10, f"relative error {error:.1e}"


def check_hermitian_toeplitz(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    spec = GridSpec(64)
    modes = {0: 2.0}
    for n in range(1, 5):
        c = 0.05 * (rng.normal() + 1j * rng.normal())
        modes[n], modes[-n] = c, np.conj(c)
    values = np.fft.ifft(ModeField.from_modes(modes, spec).coeffs).real * spec.M
    X = build_pencil(custom_profile(values, spec), 8).X
    error = float(np.max(np.abs(X - X.conj().T)))
    return "hermitian toeplitz", error < 1e-14, f"max asymmetry {error:.1e}"


def check_conservation(seed: int) -> CheckResult:
    spec = GridSpec(64)
    state = initial_condition("custom-modes", spec, {1: 0.5, -1: 0.5})
    config = SimulationConfig(damping=make_profile("zero", spec=spec), t_end=2 * np.pi, sample_dt=np.pi / 4)
    defect = float(np.max(integrate(state, config).conservation_defect))
    return "energy conservation", defect < 1e-6, f"max relative drift {defect:.1e}"


CHECKS: List[Callable[[int], CheckResult]] = [
    check_fourier_convention,
    check_undamped_pencil,
    check_constant_pencil,
    check_transport_lines,
    check_scaling_identity,
    check_hermitian_toeplitz,
    check_conservation,
]


def run_checks(seed: int = 0) -> List[CheckResult]:
    results = []
    for check in CHECKS:
        name, passed, detail = check(seed)
        logging.info(f"selftest {name}: {'pass' if passed else 'FAIL'} ({detail})")
        results.append((name, bool(passed), detail))
    return results
