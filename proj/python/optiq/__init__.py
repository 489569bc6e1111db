"""Python bindings for the optiq linear-optical logic simulator."""

from ._optiq import (
    Device,
    Outcome,
    Policy,
    Qubit,
    __version__,
    coherence_scan,
    error_report,
    fit_malus,
    fit_visibility,
    oracle_check,
    run_cli,
    run_device,
    truth_table,
)

__all__ = [
    "Device",
    "Outcome",
    "Policy",
    "Qubit",
    "__version__",
    "coherence_scan",
    "error_report",
    "fit_malus",
    "fit_visibility",
    "oracle_check",
    "run_cli",
    "run_device",
    "truth_table",
]
