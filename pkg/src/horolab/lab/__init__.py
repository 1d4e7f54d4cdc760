"""Config-driven experiment runner, reports and the acceptance suite."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .report import CSV_COLUMNS, Report, read_report, write_report
from .runner import run_experiment

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config", "CSV_COLUMNS",
           "Report", "read_report", "write_report", "run_experiment"]
