"""
Command-line front end: simulate, decay, resonances, resolvent, quasimode and selftest.

Exit codes: 0 on success, 1 on a numerical or domain error, 2 on a usage or configuration error.
"""
import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

import logging
import numpy as np
from dotenv import load_dotenv
from pydantic import ValidationError

from fracwave.common.errors import ConfigError, DecayFitError, FracwaveError
from fracwave.config import RunConfig, parse_mode_spec
from fracwave.constants import VERSION
from fracwave.damping.profiles import (
    DampingProfile,
    bump_function,
    load_custom_profile,
    low_frequency_approximation,
    make_profile,
    with_nu,
)
from fracwave.decay_analysis import (
    compensated_energy,
    exponential_rate,
    fit_exponent,
    fit_summary,
    predicted_exponent,
)
from fracwave.evolution.integrator import SimulationConfig, Trajectory, integrate
from fracwave.evolution.state import initial_condition
from fracwave.io.artifacts import config_hash, header_line, write_csv, write_json
from fracwave.io.console import console, error_console, print_checks, print_resonances, print_summary, print_table
from fracwave.resolvent import SweepConfig, quasimode_ratio, sweep
from fracwave.resonance import (
    Region,
    asymptotic_resonances,
    build_pencil,
    match_resonances,
    nu_sweep,
    pencil_resonances,
)
from fracwave.selftest import run_checks
from fracwave.spectral_core import GridSpec

load_dotenv()

TRAJECTORY_COLUMNS = ["t", "energy", "dissipation"]
RESONANCE_COLUMNS = ["re", "im", "method", "N", "nu"]
SWEEP_COLUMNS = ["tau_re", "tau_im", "norm", "N", "flagged"]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Path to a JSON or key=value configuration file.")
    parser.add_argument(
        "--loglevel",
        help="Logging level (e.g. DEBUG, INFO, WARN, ERROR, CRITICAL).",
    )
    parser.add_argument("--seed", type=int, help="Seed for randomised test vectors.")


def _add_damping(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--damping", help="chi1, chi2, chi3, constant, zero or custom.")
    parser.add_argument("--nu", type=float, help="Damping amplitude.")
    parser.add_argument("--damping-file", help="Two-column CSV (x, chi) for --damping custom.")
    parser.add_argument("--grid", type=int, help="Grid points M (a power of two).")
    parser.add_argument("--modes", type=int, help="Truncation order N of the pencil.")


def _add_flag(parser: argparse.ArgumentParser, name: str, help: str) -> None:
    parser.add_argument(name, action="store_true", default=None, help=help)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracwave",
        description="Numerical experiments for the damped fractional wave equation on the circle.",
    )
    parser.add_argument("--version", action="version", version=f"fracwave {VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Integrate in time and record the energy.")
    _add_common(simulate)
    _add_damping(simulate)
    simulate.add_argument("--model", help="multiplicative or half-wave damping.")
    simulate.add_argument("--t-end", type=float, help="Final time.")
    simulate.add_argument("--rel-tol", type=float, help="Relative tolerance.")
    simulate.add_argument("--abs-tol", type=float, help="Absolute tolerance.")
    simulate.add_argument("--sample-dt", type=float, help="Output sampling interval.")
    simulate.add_argument("--ic", help="localized-highfreq, sine or custom-modes.")
    simulate.add_argument("--ic-modes", help='Modes for custom-modes, e.g. "1=0.5,-1=0.5".')
    simulate.add_argument("--window", type=float, nargs=2, metavar=("T0", "T1"), help="Fit window.")
    simulate.add_argument("--out", help="Trajectory CSV.")
    simulate.add_argument("--summary-out", help="Run summary JSON.")

    decay = commands.add_parser("decay", help="Fit a decay exponent to a trajectory.")
    _add_common(decay)
    _add_damping(decay)
    decay.add_argument("--trajectory", help="Trajectory CSV written by simulate.")
    decay.add_argument("--window", type=float, nargs=2, metavar=("T0", "T1"), help="Fit window.")
    decay.add_argument("--power", type=float, help="Compensation power p for t^p E(t).")
    decay.add_argument("--out", help="Decay fit JSON.")
    decay.add_argument("--compensated-out", help="Compensated energy CSV.")
    decay.add_argument("--rate-out", help="Exponential rate CSV.")

    resonances = commands.add_parser("resonances", help="Resonances of the truncated pencil.")
    _add_common(resonances)
    _add_damping(resonances)
    _add_flag(resonances, "--compare-asymptotic", "Compare with the small-amplitude expansion.")
    resonances.add_argument("--k-max", type=int, help="Modes of the expansion.")
    resonances.add_argument("--nu-sweep", help='Amplitudes to sweep, e.g. "0.125,0.25,0.5,1".')
    resonances.add_argument("--out", help="Resonance CSV.")
    resonances.add_argument("--summary-out", help="Resonance summary JSON.")
    resonances.add_argument("--profile-out", help="CSV of x, chi and its band-limited part.")

    resolvent = commands.add_parser("resolvent", help="Sweep the resolvent norm over real tau.")
    _add_common(resolvent)
    _add_damping(resolvent)
    resolvent.add_argument("--tau-min", type=float, help="Lower end of the window.")
    resolvent.add_argument("--tau-max", type=float, help="Upper end of the window.")
    resolvent.add_argument("--steps", type=int, help="Number of samples.")
    resolvent.add_argument("--scale", help="physical or semiclassical.")
    _add_flag(resolvent, "--log-grid", "Space samples geometrically.")
    _add_flag(resolvent, "--strict", "Refuse windows with tau_max^2 > N/2.")
    resolvent.add_argument("--out", help="Sweep CSV.")
    resolvent.add_argument("--summary-out", help="Sweep summary JSON (default: next to --out).")

    quasimode = commands.add_parser("quasimode", help="Quasimode ratios ||P(sqrt k) u_k|| / ||u_k||.")
    _add_common(quasimode)
    _add_damping(quasimode)
    quasimode.add_argument("--k", type=int, nargs="+", help="Frequencies k.")
    quasimode.add_argument("--center", type=float, help="Bump centre.")
    quasimode.add_argument("--radius", type=float, help="Bump radius.")
    quasimode.add_argument("--out", help="Ratio CSV.")

    selftest = commands.add_parser("selftest", help="Run the fast property checks.")
    _add_common(selftest)
    return parser


def configure_logging(log_level: str) -> None:
    numeric_level = getattr(logging, log_level.upper(), None)
    if not isinstance(numeric_level, int):
        raise ConfigError(f"Invalid log level: {log_level}")
    logging.basicConfig(
        level=numeric_level,
        format='%(asctime)s - %(levelname)s - %(message)s'
    )


def _header(config: RunConfig) -> str:
    return header_line(config.command, config_hash(config.canonical()))


def _profile(config: RunConfig, spec: GridSpec) -> DampingProfile:
    if config.damping == "custom":
        if not config.damping_file:
            raise ConfigError("--damping custom needs --damping-file")
        return with_nu(load_custom_profile(config.damping_file, spec), config.nu)
    return make_profile(config.damping, config.nu, spec)


def _grid_for(config: RunConfig, max_mode: int) -> GridSpec:
    spec = GridSpec.covering(max_mode, config.grid)
    if spec.M != config.grid:
        logging.info(f"Raised grid from {config.grid} to {spec.M} points to hold modes up to {max_mode}")
    return spec


def run_simulate(config: RunConfig) -> int:
    spec = GridSpec(config.grid)
    profile = _profile(config, spec)
    modes = parse_mode_spec(config.ic_modes) if config.ic_modes else None
    state = initial_condition(config.ic, spec, modes)
    simulation = SimulationConfig(
        damping=profile,
        damping_kind=config.model,
        t_end=config.t_end,
        rel_tol=config.rel_tol,
        abs_tol=config.abs_tol,
        sample_dt=config.sample_dt,
    )
    trajectory = integrate(state, simulation)
    header = _header(config)
    if config.out:
        write_csv(config.out, header, TRAJECTORY_COLUMNS, trajectory.rows())

    summary = {
        "classification": profile.classification,
        "initial_energy": float(trajectory.energies[0]),
        "final_energy": float(trajectory.energies[-1]),
        "final_time": float(trajectory.times[-1]),
        "steps": trajectory.steps,
        "max_balance_defect": float(np.max(trajectory.conservation_defect)),
    }
    if config.window:
        summary["fit"] = fit_summary(fit_exponent(trajectory, config.window), _prediction(profile))
    if config.summary_out:
        write_json(config.summary_out, header, summary)
    print_summary(f"simulate {profile.kind} nu={profile.nu} ({config.model})", [
        (key, value) for key, value in summary.items() if key != "fit"
    ])
    return 0


def _prediction(profile: DampingProfile):
    try:
        return predicted_exponent(profile)
    except DecayFitError as e:
        logging.warning(f"No predicted rate: {e}")
        return None


def run_decay(config: RunConfig) -> int:
    if not config.trajectory:
        raise ConfigError("decay needs --trajectory")
    trajectory = Trajectory.load_csv(config.trajectory)
    fit = fit_exponent(trajectory, config.window)
    prediction = _prediction(_profile(config, GridSpec(config.grid)))
    header = _header(config)
    record = fit_summary(fit, prediction)
    if config.out:
        write_json(config.out, header, record)
    if config.compensated_out:
        write_csv(config.compensated_out, header, ["t", "compensated"], compensated_energy(trajectory, config.power))
    if config.rate_out:
        write_csv(config.rate_out, header, ["t", "rate"], exponential_rate(trajectory))
    print_summary("decay fit", [
        ("window", f"[{fit.window[0]:g}, {fit.window[1]:g}]"),
        ("exponent", fit.exponent),
        ("residual", fit.residual),
        ("predicted", record["predicted"]),
        ("classification", record["classification"]),
    ])
    return 0


def _match_record(report) -> dict:
    return {
        "pairs": [[[a.real, a.imag], [b.real, b.imag], d] for a, b, d in report.pairs],
        "unpaired_a": [[v.real, v.imag] for v in report.unpaired_a],
        "unpaired_b": [[v.real, v.imag] for v in report.unpaired_b],
        "max_distance": report.max_distance,
    }


def run_resonances(config: RunConfig) -> int:
    N = config.modes
    spec = _grid_for(config, max(2 * N, 2 * config.k_max))
    profile = _profile(config, spec)
    pencil_set = pencil_resonances(build_pencil(profile, N))
    rows: List[tuple] = list(pencil_set.rows())
    slowest = pencil_set.slowest()
    summary = {
        "N": N,
        "nu": profile.nu,
        "slowest": [slowest.real, slowest.imag],
        "symmetric": pencil_set.is_symmetric(),
    }

    region = Region(re_min=0.5, re_max=np.sqrt(config.k_max) + 0.25)
    if config.compare_asymptotic:
        asymptotic = asymptotic_resonances(profile, k_max=config.k_max)
        rows.extend(asymptotic.rows())
        summary["asymptotic_match"] = _match_record(match_resonances(asymptotic, pencil_set, region))
    if config.nu_sweep:
        if profile.kind == "custom":
            raise ConfigError("--nu-sweep needs a built-in damping kind")
        summary["nu_sweep"] = []
        for entry in nu_sweep(profile.kind, config.nu_sweep, N, config.k_max, spec):
            rows.extend(entry.pencil.rows())
            rows.extend(entry.asymptotic.rows())
            summary["nu_sweep"].append({"nu": entry.nu, "match": _match_record(entry.matches)})

    header = _header(config)
    if config.out:
        write_csv(config.out, header, RESONANCE_COLUMNS, rows)
    if config.summary_out:
        write_json(config.summary_out, header, summary)
    if config.profile_out:
        band_limited = low_frequency_approximation(profile, N)
        write_csv(config.profile_out, header, ["x", "chi", "chi_N"], zip(
            spec.points, profile.samples.values, band_limited.samples.values,
        ))
    print_resonances(f"{profile.kind} nu={profile.nu} N={N}: resonances closest to the real axis",
                     pencil_set.right_half())
    console.print(f"Slowest nonzero resonance: {slowest.real:.6g} {slowest.imag:+.6g}i")
    return 0


def run_resolvent(config: RunConfig) -> int:
    spec = _grid_for(config, 2 * config.modes)
    profile = _profile(config, spec)
    result = sweep(SweepConfig(
        tau_min=config.tau_min,
        tau_max=config.tau_max,
        steps=config.steps,
        N=config.modes,
        damping=profile,
        scale=config.scale,
        log_grid=bool(config.log_grid),
        allow_unreliable=not config.strict,
    ))
    header = _header(config)
    if config.out:
        write_csv(config.out, header, SWEEP_COLUMNS, [
            (s.tau.real, s.tau.imag, s.norm, s.N, s.flagged) for s in result.samples
        ])
    summary_path = config.summary_out or (str(Path(config.out).with_suffix(".json")) if config.out else None)
    if summary_path:
        write_json(summary_path, header, result.summary.to_dict())
    print_summary(f"resolvent sweep {profile.kind} nu={profile.nu} N={config.modes}",
                  list(result.summary.to_dict().items()))
    return 0


def run_quasimode(config: RunConfig) -> int:
    spec = _grid_for(config, 4 * max(config.k))
    profile = _profile(config, spec)
    bump = bump_function(config.center, config.radius, spec)
    rows = [(k, quasimode_ratio(profile, bump, k)) for k in config.k]
    if config.out:
        write_csv(config.out, _header(config), ["k", "ratio"], rows)
    print_table(f"quasimodes, bump at {config.center:g} radius {config.radius:g}", ["k", "ratio"], rows)
    return 0


def run_selftest(config: RunConfig) -> int:
    results = run_checks(config.seed)
    print_checks(results)
    return 0 if all(passed for _, passed, _ in results) else 1


HANDLERS: Dict[str, Callable[[RunConfig], int]] = {
    "simulate": run_simulate,
    "decay": run_decay,
    "resonances": run_resonances,
    "resolvent": run_resolvent,
    "quasimode": run_quasimode,
    "selftest": run_selftest,
}


def parse_and_dispatch(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, merge them with an optional config file and run one subcommand.

    Returns:
        0 on success, 1 on a domain error, 2 on a usage error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    flags = {key: value for key, value in vars(args).items() if key not in ("command", "config")}
    try:
        file_values = RunConfig.load_config(args.config) if args.config else {}
        config = RunConfig.resolve(args.command, file_values, flags)
        configure_logging(config.loglevel)
        return HANDLERS[config.command](config)
    except (ConfigError, ValidationError) as e:
        error_console.print(f"[bold red]usage error:[/bold red] {e}")
        parser.print_usage(sys.stderr)
        return 2
    except FracwaveError as e:
        logging.error(f"{args.command} failed: {e}")
        error_console.print(f"[bold red]error:[/bold red] {e}")
        return 1


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
