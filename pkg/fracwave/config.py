"""
Run configuration: defaults, config files and command-line flags merged into one validated model.
"""
import json
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import logging
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, field_validator

from fracwave.common.errors import ConfigError
from fracwave.constants import (
    DEFAULT_ABS_TOL,
    DEFAULT_ASYMPTOTIC_MODES,
    DEFAULT_GRID_POINTS,
    DEFAULT_MODES,
    DEFAULT_REL_TOL,
    DEFAULT_SAMPLE_DT,
    DEFAULT_SWEEP_STEPS,
    MIN_GRID_POINTS,
    THREADS_ENV,
)

# Keys that name output locations or verbosity; they do not change any computed number.
_PRESENTATION_KEYS = {"out", "summary_out", "compensated_out", "rate_out", "profile_out", "loglevel"}


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item for item in value.replace(",", " ").split() if item]
    return value


class RunConfig(BaseModel):
    """
    Every setting of a command-line run. Unknown keys are rejected.
    """
    model_config = ConfigDict(extra="forbid")

    command: Literal["simulate", "decay", "resonances", "resolvent", "quasimode", "selftest"]
    loglevel: str = "WARN"
    seed: int = 0

    # damping
    damping: Literal["chi1", "chi2", "chi3", "constant", "zero", "custom"] = "chi3"
    nu: Optional[float] = Field(default=None, ge=0)
    damping_file: Optional[str] = None
    model: Literal["multiplicative", "half-wave"] = "multiplicative"

    # discretisation
    grid: int = Field(default=DEFAULT_GRID_POINTS, ge=MIN_GRID_POINTS)
    modes: int = Field(default=DEFAULT_MODES, ge=1)

    # time integration
    t_end: float = Field(default=100.0, gt=0)
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    sample_dt: float = Field(default=DEFAULT_SAMPLE_DT, gt=0)
    ic: Literal["localized-highfreq", "sine", "custom-modes"] = "localized-highfreq"
    ic_modes: Optional[str] = None

    # decay fits
    trajectory: Optional[str] = None
    window: Optional[Tuple[float, float]] = None
    power: float = Field(default=2.0, ge=0)

    # resonances
    compare_asymptotic: bool = False
    k_max: int = Field(default=DEFAULT_ASYMPTOTIC_MODES, ge=1)
    nu_sweep: Optional[List[float]] = None

    # resolvent sweeps
    tau_min: float = 5.0
    tau_max: float = 12.0
    steps: int = Field(default=DEFAULT_SWEEP_STEPS, ge=2)
    log_grid: bool = False
    scale: Literal["physical", "semiclassical"] = "physical"
    strict: bool = False

    # quasimodes
    k: List[int] = Field(default_factory=lambda: [16, 64])
    center: float = 0.0
    radius: float = 0.5

    # outputs
    out: Optional[str] = None
    summary_out: Optional[str] = None
    compensated_out: Optional[str] = None
    rate_out: Optional[str] = None
    profile_out: Optional[str] = None

    @field_validator("window", "nu_sweep", "k", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("grid")
    @classmethod
    def check_grid(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError(f"grid must be a power of two, got {value}")
        return value

    @field_validator("loglevel")
    @classmethod
    def check_loglevel(cls, value: str) -> str:
        level = value.upper()
        if level not in ("DEBUG", "INFO", "WARN", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value}")
        return level

    @staticmethod
    def load_config(config_path: str) -> Dict[str, Any]:
        """
        Loads settings from a config file.

        `.json` files are parsed as JSON objects; any other file is read as flat `key=value`
        lines. Keys mirror the command-line flags, with `-` and `_` interchangeable.

        Args:
            config_path (str): Path to the configuration file.

        Returns:
            Dict[str, Any]: Settings keyed by field name.

        Raises:
            ConfigError: If the file is missing or cannot be parsed.
        """
        config_file = Path(config_path)
        if not config_file.is_file():
            logging.error(f"Configuration file '{config_path}' does not exist.")
            raise ConfigError(f"Configuration file '{config_path}' does not exist")

        if config_file.suffix == ".json":
            try:
                with open(config_file, "r") as f:
                    values = json.load(f)
            except json.JSONDecodeError as e:
                logging.error(f"Error parsing configuration file: {e}")
                raise ConfigError(f"Error parsing configuration file '{config_path}': {e}") from e
            if not isinstance(values, dict):
                raise ConfigError(f"Configuration file '{config_path}' must hold a JSON object")
        else:
            values = dotenv_values(config_file)
        return {str(key).strip().replace("-", "_"): value for key, value in values.items()}

    @classmethod
    def resolve(
        cls,
        command: str,
        file_values: Optional[Dict[str, Any]] = None,
        flag_values: Optional[Dict[str, Any]] = None,
    ) -> "RunConfig":
        """
        Merge defaults < config file < flags. Flags left unset (None) do not override.
        """
        merged: Dict[str, Any] = dict(file_values or {})
        file_command = merged.pop("command", None)
        if file_command is not None and file_command != command:
            raise ConfigError(f"Configuration file is for '{file_command}', not '{command}'")
        merged.update({key: value for key, value in (flag_values or {}).items() if value is not None})
        merged["command"] = command
        return cls.model_validate(merged)

    def canonical(self) -> Dict[str, Any]:
        """The settings that determine computed numbers, for hashing."""
        return self.model_dump(mode="json", exclude=_PRESENTATION_KEYS)


def parse_mode_spec(text: str) -> Dict[int, complex]:
    """
    Parse "n=c,..." into {n: c}, e.g. "1=0.5,-1=0.5" or "3=1".

    Raises:
        ConfigError: On a malformed entry.
    """
    modes: Dict[int, complex] = {}
    for entry in _split_list(text):
        try:
            index, value = entry.split("=", 1)
            modes[int(index)] = complex(value.replace("i", "j"))
        except ValueError as e:
            raise ConfigError(f"Malformed mode entry '{entry}' (expected n=c)") from e
    if not modes:
        raise ConfigError("Mode list is empty")
    return modes


def sweep_workers() -> int:
    """
    Worker count for parallel sweeps: FRACWAVE_THREADS when set, else the CPU count.

    Raises:
        ConfigError: If FRACWAVE_THREADS is not a positive integer.
    """
    raw = os.getenv(THREADS_ENV)
    if raw is None or not raw.strip():
        return os.cpu_count() or 1
    try:
        workers = int(raw)
    except ValueError as e:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got '{raw}'") from e
    if workers < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got '{raw}'")
    return workers
