"""
Configuration management for HyperBit.
Uses a flat key=value .hyperbitrc for run settings and .env for the environment.
Every run is reproducible from the effective configuration it prints.
"""

import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from dotenv import dotenv_values, load_dotenv, set_key
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .bitgen import DEFAULT_DISCARD, OUTPUT_LABELS
from .chaos import REFERENCE_STATE, BackendKind, InitialCondition, SolverConfig
from .errors import ConfigError
from .fxp import OverflowPolicy

CONFIG_FILENAME = ".hyperbitrc"
OUTPUT_DIR_ENV = "HYPERBIT_OUTPUT_DIR"

# Default run settings (what `hyperbit config --export` writes for a fresh checkout)
DEFAULT_SETTINGS: Dict[str, Any] = {
    "x0": REFERENCE_STATE[0],
    "y0": REFERENCE_STATE[1],
    "z0": REFERENCE_STATE[2],
    "u0": REFERENCE_STATE[3],
    "v0": REFERENCE_STATE[4],
    "h": 0.01,
    "backend": "fixed",
    "overflow": "wrap",
    "format": "packed",
    "bits": 1_000_000,
    "discard": DEFAULT_DISCARD,
    "streams": "B1,B2,B3,B4,B5",
    "alpha": 0.01,
    "sequences": 100,
    "length": 1_000_000,
    "block_size": 128,
    "serial_m": 16,
    "apen_m": 10,
    "widths": "4,8,12,16,20,24",
    "workers": 1,
    "output_dir": ".",
}


class RunConfig(BaseModel):
    """Validated, effective settings of one invocation"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    x0: float = REFERENCE_STATE[0]
    y0: float = REFERENCE_STATE[1]
    z0: float = REFERENCE_STATE[2]
    u0: float = REFERENCE_STATE[3]
    v0: float = REFERENCE_STATE[4]
    h: float = Field(default=0.01, gt=0)
    backend: BackendKind = BackendKind.FIXED
    overflow: OverflowPolicy = OverflowPolicy.WRAP
    format: str = "packed"
    bits: int = Field(default=1_000_000, ge=1)
    discard: int = Field(default=DEFAULT_DISCARD, ge=0)
    streams: List[str] = Field(default_factory=lambda: [label.value for label in OUTPUT_LABELS])
    alpha: float = Field(default=0.01, gt=0, lt=1)
    sequences: int = Field(default=100, ge=1)
    length: int = Field(default=1_000_000, ge=1)
    block_size: int = Field(default=128, ge=20)
    serial_m: int = Field(default=16, ge=2)
    apen_m: int = Field(default=10, ge=1)
    widths: List[int] = Field(default_factory=lambda: [4, 8, 12, 16, 20, 24])
    workers: int = Field(default=1, ge=1)
    output_dir: Path = Path(".")

    @field_validator("format")
    @classmethod
    def _known_format(cls, value: str) -> str:
        if value not in ("packed", "ascii"):
            raise ValueError("format must be 'packed' or 'ascii'")
        return value

    @field_validator("streams", mode="before")
    @classmethod
    def _split_streams(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = [part.strip().upper() for part in value.split(",") if part.strip()]
        valid = {label.value for label in OUTPUT_LABELS}
        unknown = [label for label in value if label not in valid]
        if unknown:
            raise ValueError(f"unknown stream labels {unknown}; expected B1..B5")
        return value

    @field_validator("widths", mode="before")
    @classmethod
    def _split_widths(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = [int(part) for part in value.split(",") if part.strip()]
        if any(not 1 <= int(w) <= 32 for w in value):
            raise ValueError("widths must lie in 1..32")
        return value

    def initial_condition(self) -> InitialCondition:
        return InitialCondition(x0=self.x0, y0=self.y0, z0=self.z0, u0=self.u0, v0=self.v0)

    def solver(self) -> SolverConfig:
        try:
            return SolverConfig(h=self.h, backend=self.backend, overflow=self.overflow)
        except ValidationError as e:
            raise ConfigError(f"Invalid solver settings: {_first_message(e)}")

    def to_settings(self) -> Dict[str, str]:
        """Flat key=value form, the inverse of load_run_config"""
        flat: Dict[str, str] = {}
        for key, value in self.model_dump(mode="json").items():
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            flat[key] = str(value)
        return flat


def _first_message(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    return f"{location}: {first['msg']}" if location else first["msg"]


def _cli_config_path() -> Optional[Path]:
    try:
        import cli

        configured = getattr(cli.app_state, "config_path", None)
        return Path(configured) if configured else None
    except ImportError:
        return None


def config_path(path: Optional[Path] = None) -> Path:
    """The config file in use: explicit path, else --config PATH, else .hyperbitrc"""
    if path is not None:
        return Path(path)
    return _cli_config_path() or Path(CONFIG_FILENAME)


def read_settings(path: Optional[Path] = None) -> Tuple[Dict[str, str], Path]:
    """Raw key=value pairs from the config file (empty if it does not exist)"""
    target = config_path(path)
    if not target.exists():
        if path is not None or _cli_config_path() is not None:
            raise ConfigError(f"Config file not found: {target}")
        return {}, target
    try:
        values = dotenv_values(target)
    except OSError as e:
        raise ConfigError(f"Cannot read config file {target}: {e}")
    unknown = sorted(set(values) - set(DEFAULT_SETTINGS))
    if unknown:
        raise ConfigError(
            f"Unknown keys in {target}: {', '.join(unknown)}",
            suggestion=f"Valid keys: {', '.join(DEFAULT_SETTINGS)}",
        )
    return {k: v for k, v in values.items() if v is not None}, target


def load_run_config(
    overrides: Optional[Dict[str, Any]] = None, path: Optional[Path] = None
) -> RunConfig:
    """
    Build the effective configuration.

    Priority: command-line flags > HYPERBIT_OUTPUT_DIR > config file > defaults.
    Flags passed as None are treated as not given.
    """
    load_dotenv()

    settings: Dict[str, Any] = dict(DEFAULT_SETTINGS)
    file_settings, _ = read_settings(path)
    settings.update(file_settings)

    env_output = os.environ.get(OUTPUT_DIR_ENV)
    if env_output:
        settings["output_dir"] = env_output

    for key, value in (overrides or {}).items():
        if value is not None:
            settings[key] = value

    try:
        return RunConfig(**settings)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {_first_message(e)}")


def get_config_value(key: str, path: Optional[Path] = None) -> Any:
    """Get one effective configuration value"""
    if key not in DEFAULT_SETTINGS:
        raise ConfigError(f"Unknown config key '{key}'")
    return load_run_config(path=path).to_settings()[key]


def set_preference(key: str, value: str, path: Optional[Path] = None) -> Path:
    """Persist one key=value pair to the config file after validating it"""
    if key not in DEFAULT_SETTINGS:
        raise ConfigError(
            f"Unknown config key '{key}'",
            suggestion=f"Valid keys: {', '.join(DEFAULT_SETTINGS)}",
        )
    target = config_path(path)
    current, _ = read_settings(target) if target.exists() else ({}, target)
    candidate = {**DEFAULT_SETTINGS, **current, key: value}
    try:
        RunConfig(**candidate)
    except ValidationError as e:
        raise ConfigError(f"Invalid value for {key}: {_first_message(e)}")

    if not target.exists():
        target.touch()
    set_key(str(target), key, str(value), quote_mode="never")
    return target


def export_settings(config: RunConfig, destination: Path) -> Path:
    """Write the effective configuration as a reusable key=value file"""
    from .export import write_text

    lines = [f"{key}={value}" for key, value in config.to_settings().items()]
    write_text(Path(destination), "\n".join(lines) + "\n")
    return Path(destination)
