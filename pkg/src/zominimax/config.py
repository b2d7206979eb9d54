"""Run configuration files: INI-style sections with strictly known keys.

Three sections are recognized::

    [run]
    solver = zo-agp            ; zo-agp | zo-bapg | zo-minmax | fo-agp | fo-minmax
    problem = saddle           ; toy name for the generic solve command
    seeds = 0..4               ; "3", "0,2,5", or "lo..hi" (inclusive)
    out = results

    [schedule]
    kind = practical           ; practical | constant | theoretical
    ; practical: alpha_scale, alpha_offset, beta, eta_scale, mu_x, mu_y, q_x, q_y
    ; constant:  alpha, beta, eta, mu_x, mu_y, q_x, q_y
    ; theoretical: rho, eps, lipschitz_x, lipschitz_y, grad_bound, y_radius,
    ;              n_blocks, dim_x, dim_y, gamma_min, gamma_max,
    ;              value_lower, value_upper

    [stop]
    max_iters = 2000
    max_queries =              ; blank or absent means unbounded
    gap_threshold =
    gap_check_period = 100

Unknown sections or keys are configuration errors (typos must not silently
change a run).  Every key is optional; omitted values fall back to solver
defaults.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .schedules import (
    ConstantSchedule,
    PracticalSchedule,
    ProblemConstants,
    TheoreticalSchedule,
)
from .solvers import SOLVER_KINDS, StopRule

_RUN_KEYS = {"solver", "problem", "seeds", "out"}
_SCHEDULE_KEYS = {
    "practical": {"kind", "alpha_scale", "alpha_offset", "beta", "eta_scale",
                  "mu_x", "mu_y", "q_x", "q_y"},
    "constant": {"kind", "alpha", "beta", "eta", "mu_x", "mu_y", "q_x", "q_y"},
    "theoretical": {"kind", "rho", "eps", "lipschitz_x", "lipschitz_y",
                    "grad_bound", "y_radius", "n_blocks", "dim_x", "dim_y",
                    "gamma_min", "gamma_max", "value_lower", "value_upper"},
}
_STOP_KEYS = {"max_iters", "max_queries", "gap_threshold", "gap_check_period"}
_SECTIONS = {"run", "schedule", "stop"}


@dataclass
class RunConfig:
    solver: str = "zo-agp"
    problem: str | None = None
    seeds: list = field(default_factory=lambda: [0])
    out: str | None = None
    schedule: object = None
    stop: StopRule | None = None


def parse_seeds(text):
    """Parse "3", "0,2,5", or "0..9" (inclusive range) into a seed list."""
    text = text.strip()
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        try:
            lo, hi = int(lo_s), int(hi_s)
        except ValueError:
            raise ConfigurationError(f"bad seed range {text!r}") from None
        if hi < lo:
            raise ConfigurationError(f"empty seed range {text!r}")
        return list(range(lo, hi + 1))
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigurationError(f"bad seed list {text!r}") from None


def _clean(section):
    """Section items with blank values dropped (blank means 'use default')."""
    return {k: v.strip() for k, v in section.items() if v.strip() != ""}


def _reject_unknown(found, allowed, where):
    unknown = sorted(set(found) - allowed)
    if unknown:
        raise ConfigurationError(
            f"unknown key(s) in [{where}]: {', '.join(unknown)}; "
            f"allowed: {', '.join(sorted(allowed))}"
        )


def _to_float(items, key):
    try:
        return float(items[key])
    except ValueError:
        raise ConfigurationError(f"{key} must be a number, got {items[key]!r}") from None


def _to_int(items, key):
    try:
        return int(items[key])
    except ValueError:
        raise ConfigurationError(
            f"{key} must be an integer, got {items[key]!r}") from None


def _build_schedule(items):
    kind = items.get("kind", "practical")
    if kind not in _SCHEDULE_KEYS:
        raise ConfigurationError(
            f"unknown schedule kind {kind!r}; expected one of "
            f"{', '.join(sorted(_SCHEDULE_KEYS))}"
        )
    _reject_unknown(items, _SCHEDULE_KEYS[kind], "schedule")
    floats = {k: _to_float(items, k) for k in items
              if k not in ("kind", "q_x", "q_y", "n_blocks", "dim_x", "dim_y")}
    ints = {k: _to_int(items, k) for k in ("q_x", "q_y", "n_blocks",
                                           "dim_x", "dim_y") if k in items}
    if kind == "practical":
        return PracticalSchedule(**floats, **ints)
    if kind == "constant":
        if "alpha" not in floats or "beta" not in floats:
            raise ConfigurationError("constant schedule requires alpha and beta")
        return ConstantSchedule(**floats, **ints)
    required = {"rho", "eps", "lipschitz_x", "lipschitz_y"}
    missing = sorted(required - set(items))
    if missing:
        raise ConfigurationError(
            f"theoretical schedule requires: {', '.join(missing)}"
        )
    rho = floats.pop("rho")
    eps = floats.pop("eps")
    consts = ProblemConstants(
        lipschitz_x=floats.pop("lipschitz_x"),
        lipschitz_y=floats.pop("lipschitz_y"),
        grad_bound=floats.pop("grad_bound", 1.0),
        y_radius=floats.pop("y_radius", 1.0),
        gamma_min=floats.pop("gamma_min", 0.0),
        gamma_max=floats.pop("gamma_max", 0.0),
        value_lower=floats.pop("value_lower", 0.0),
        value_upper=floats.pop("value_upper", 0.0),
        **ints,
    )
    return TheoreticalSchedule(consts, rho, eps)


def _build_stop(items):
    _reject_unknown(items, _STOP_KEYS, "stop")
    kwargs = {}
    if "max_iters" in items:
        kwargs["max_iters"] = _to_int(items, "max_iters")
    if "max_queries" in items:
        kwargs["max_queries"] = _to_int(items, "max_queries")
    if "gap_threshold" in items:
        kwargs["gap_threshold"] = _to_float(items, "gap_threshold")
    if "gap_check_period" in items:
        kwargs["gap_check_period"] = _to_int(items, "gap_check_period")
    if "max_iters" not in kwargs and "max_queries" not in kwargs:
        kwargs["max_iters"] = 1000
    return StopRule(**kwargs)


def parse_run_config(path):
    """Load a RunConfig from an INI file, rejecting unknown keys."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"cannot read config file {path!r}")
    unknown_sections = sorted(set(parser.sections()) - _SECTIONS)
    if unknown_sections:
        raise ConfigurationError(
            f"unknown section(s): {', '.join(unknown_sections)}; "
            f"allowed: {', '.join(sorted(_SECTIONS))}"
        )
    cfg = RunConfig()
    if parser.has_section("run"):
        items = _clean(parser["run"])
        _reject_unknown(items, _RUN_KEYS, "run")
        if "solver" in items:
            if items["solver"] not in SOLVER_KINDS:
                raise ConfigurationError(
                    f"unknown solver {items['solver']!r}; expected one of "
                    f"{', '.join(SOLVER_KINDS)}"
                )
            cfg.solver = items["solver"]
        if "problem" in items:
            cfg.problem = items["problem"]
        if "seeds" in items:
            cfg.seeds = parse_seeds(items["seeds"])
        if "out" in items:
            cfg.out = items["out"]
    if parser.has_section("schedule"):
        cfg.schedule = _build_schedule(_clean(parser["schedule"]))
    if parser.has_section("stop"):
        cfg.stop = _build_stop(_clean(parser["stop"]))
    return cfg
