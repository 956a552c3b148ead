"""Experiment harness: config parsing, grid execution, artifacts, CLI."""

from .config import (
    ConfigError,
    ExperimentConfig,
    OUTPUT_ENV_VAR,
    PRESETS,
    config_hash,
    parse_config,
    parse_config_file,
)
from .experiment import (
    TRACE_HEADER,
    initial_point,
    read_trace_csv,
    resolve_output_dir,
    run_experiment,
    write_trace_csv,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "OUTPUT_ENV_VAR",
    "PRESETS",
    "TRACE_HEADER",
    "config_hash",
    "initial_point",
    "parse_config",
    "parse_config_file",
    "read_trace_csv",
    "resolve_output_dir",
    "run_experiment",
    "write_trace_csv",
]
