"""Closed-loop RRAM crossbar programming simulator."""

import json as _json

from ._core import (
    Crossbar,
    CrossbarConfig,
    DeviceParams,
    RramprogError,
    SensePath,
    TargetInterval,
    assign_intervals,
    default_config_text,
    normalize_config,
    program_device,
    separability,
)
from ._core import run_experiment_json as _run_experiment_json


def run_experiment(config_text="", **overrides):
    """Run the experiment and return the report as a dict.

    Keyword overrides use config keys with dots replaced by double underscores,
    for example ``experiment__replicas=2``.
    """
    lines = [config_text] + [f"{k.replace('__', '.')} = {v}" for k, v in overrides.items()]
    return _json.loads(_run_experiment_json("\n".join(lines)))


__all__ = [
    "Crossbar",
    "CrossbarConfig",
    "DeviceParams",
    "RramprogError",
    "SensePath",
    "TargetInterval",
    "assign_intervals",
    "default_config_text",
    "normalize_config",
    "program_device",
    "run_experiment",
    "separability",
]
