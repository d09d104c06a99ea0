"""Provably safe sampled-data control with barrier-function filtering."""

from ._core import (
    Error,
    RunResult,
    ScenarioConfig,
    ValidationReport,
    __version__,
    load_scenario,
    parse_scenario,
    run,
    serialize_scenario,
    validate,
)

__all__ = [
    "Error",
    "RunResult",
    "ScenarioConfig",
    "ValidationReport",
    "__version__",
    "load_scenario",
    "parse_scenario",
    "run",
    "serialize_scenario",
    "validate",
]
