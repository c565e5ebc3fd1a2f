"""Rank-based inference of private attributes through top-k search interfaces."""

import json

from ._core import (
    Instance,
    RankleakError,
    erf,
    estimates,
    feasible_values,
    load_csv,
    scenario_boolean_preference,
    scenario_zipcode,
    uniform_bool,
    with_weights,
    zipf,
)
from ._core import attack_json as _attack_json

__all__ = [
    "Instance",
    "RankleakError",
    "attack",
    "erf",
    "estimates",
    "feasible_values",
    "load_csv",
    "scenario_boolean_preference",
    "scenario_zipcode",
    "uniform_bool",
    "with_weights",
    "zipf",
]


def attack(instance, victim, algorithm="qi-point", **kwargs):
    """Run one attack and return its outcome as a dict."""
    return json.loads(_attack_json(instance, victim, algorithm, **kwargs))
