"""Command-line interface.

Subcommands:

* ``toy``      — run solvers on a named analytic problem
* ``poison``   — run the data-poisoning experiment
* ``gen-data`` — write a synthetic dataset to CSV (columns f0..f{d-1},label)
* ``solve``    — run from a config file

Common flags: --config, --seed, --seeds, --out, --solver, --iters, --q,
--mu, --schedule.  Flags override config-file values.
"""

from __future__ import annotations

import csv
import dataclasses
import sys

import click

from . import __version__
from .bench.poisoning import generate_dataset
from .bench.runner import ExperimentConfig, run_experiment, run_toy
from .bench.toys import TOY_NAMES, make_toy
from .config import RunConfig, parse_run_config, parse_seeds
from .errors import ConfigurationError
from .schedules import ConstantSchedule, PracticalSchedule, TheoreticalSchedule
from .solvers import SOLVER_KINDS, StopRule

_SCHEDULE_CHOICES = ("practical", "theoretical", "constant")


def common_options(fn):
    decorators = [
        click.option("--config", "config_path", type=click.Path(exists=True),
                     default=None, help="Run configuration file."),
        click.option("--seed", type=int, default=None,
                     help="Single seed (overrides --seeds)."),
        click.option("--seeds", "seeds_text", type=str, default=None,
                     help='Seed list: "3", "0,2,5", or "0..9".'),
        click.option("--out", "out_dir", type=click.Path(), default=None,
                     help="Output directory."),
        click.option("--solver", type=click.Choice(SOLVER_KINDS), default=None,
                     help="Solver to run."),
        click.option("--iters", type=int, default=None,
                     help="Iteration budget."),
        click.option("--q", "q_batch", type=int, default=None,
                     help="Direction batch size per gradient estimate."),
        click.option("--mu", type=float, default=None,
                     help="Smoothing radius."),
        click.option("--schedule", "schedule_kind",
                     type=click.Choice(_SCHEDULE_CHOICES), default=None,
                     help="Schedule family."),
    ]
    for deco in reversed(decorators):
        fn = deco(fn)
    return fn


def _load_config(config_path):
    return parse_run_config(config_path) if config_path else RunConfig()


def _resolve_seeds(cfg, seed, seeds_text):
    if seed is not None:
        return [seed]
    if seeds_text is not None:
        return parse_seeds(seeds_text)
    return cfg.seeds


def _toy_schedule_factory(toy, cfg, schedule_kind, q_batch, mu):
    """Build the per-solver schedule function for a toy run."""

    def factory(kind):
        if cfg.schedule is not None and schedule_kind is None:
            return _override_schedule(cfg.schedule, q_batch, mu)
        chosen = schedule_kind or "practical"
        if chosen == "theoretical":
            if toy.constants is None:
                raise ConfigurationError(
                    f"toy {toy.name!r} does not declare problem constants; "
                    "the theoretical schedule needs them"
                )
            rho = 1.0 / (10.0 * toy.constants.lipschitz_y)
            return TheoreticalSchedule(toy.constants, rho, eps=0.1)
        if chosen == "constant" or kind in ("zo-minmax", "fo-minmax"):
            sched = ConstantSchedule(alpha=0.02, beta=0.05)
        else:
            sched = PracticalSchedule()
        return _override_schedule(sched, q_batch, mu)

    return factory


def _override_schedule(sched, q_batch, mu):
    """Apply --q/--mu on top of a schedule that carries fixed mu and q."""
    if q_batch is None and mu is None:
        return sched
    if not dataclasses.is_dataclass(sched):
        raise ConfigurationError(
            "--q/--mu overrides apply to practical or constant schedules only"
        )
    changes = {}
    if q_batch is not None:
        changes.update(q_x=q_batch, q_y=q_batch)
    if mu is not None:
        changes.update(mu_x=mu, mu_y=mu)
    return dataclasses.replace(sched, **changes)


def _stop_rule(cfg, iters, default_iters):
    if cfg.stop is not None and iters is None:
        return cfg.stop
    base = cfg.stop
    max_iters = iters if iters is not None else (
        base.max_iters if base is not None and base.max_iters else default_iters)
    return StopRule(
        max_iters=max_iters,
        max_queries=base.max_queries if base is not None else None,
        gap_threshold=base.gap_threshold if base is not None else None,
        gap_check_period=base.gap_check_period if base is not None else 100,
    )


@click.group()
@click.version_option(version=__version__, prog_name="zominimax")
def main():
    """Zeroth-order minimax solvers and benchmarks."""


@main.command("toy")
@click.option("--name", type=click.Choice(TOY_NAMES), default="saddle",
              help="Toy problem to solve.")
@common_options
def toy_cmd(name, config_path, seed, seeds_text, out_dir, solver, iters,
            q_batch, mu, schedule_kind):
    """Run solvers on a named analytic problem."""
    cfg = _load_config(config_path)
    if cfg.problem and cfg.problem != name:
        name = cfg.problem
    toy = make_toy(name)
    kinds = [solver or cfg.solver]
    seeds = _resolve_seeds(cfg, seed, seeds_text)
    stop = _stop_rule(cfg, iters, default_iters=5000)
    out = out_dir or cfg.out or "results"
    factory = _toy_schedule_factory(toy, cfg, schedule_kind, q_batch, mu)
    summary = run_toy(name, kinds, seeds, factory, stop, out)
    _echo_summary(summary, out)


@main.command("poison")
@click.option("--n-samples", "-k", type=int, default=1000,
              help="Dataset size.")
@click.option("--dim", "-d", type=int, default=100,
              help="Feature dimension.")
@click.option("--ratio", type=float, default=0.1,
              help="Poisoned fraction of the training set.")
@click.option("--epsilon", type=float, default=2.0,
              help="Sup-norm radius of the perturbation box.")
@click.option("--train-frac", type=float, default=0.9,
              help="Training fraction of the seeded split.")
@click.option("--noise-var", type=float, default=1e-3,
              help="Label-noise variance.")
@click.option("--solvers", "solvers_text", type=str, default=None,
              help="Comma-separated solver list (default zo-agp,zo-minmax).")
@common_options
def poison_cmd(n_samples, dim, ratio, epsilon, train_frac, noise_var,
               solvers_text, config_path, seed, seeds_text, out_dir, solver,
               iters, q_batch, mu, schedule_kind):
    """Run the data-poisoning experiment."""
    cfg = _load_config(config_path)
    seeds = _resolve_seeds(cfg, seed, seeds_text)
    if solvers_text:
        kinds = tuple(s.strip() for s in solvers_text.split(",") if s.strip())
    elif solver or (config_path and cfg.solver):
        kinds = (solver or cfg.solver,)
    else:
        kinds = ("zo-agp", "zo-minmax")
    stop_iters = iters
    if stop_iters is None and cfg.stop is not None and cfg.stop.max_iters:
        stop_iters = cfg.stop.max_iters
    exp = ExperimentConfig(
        solvers=kinds,
        seeds=tuple(seeds),
        n_samples=n_samples,
        dim=dim,
        poison_ratio=ratio,
        epsilon=epsilon,
        train_frac=train_frac,
        noise_var=noise_var,
        iters=stop_iters if stop_iters is not None else 50000,
        q=q_batch if q_batch is not None else 20,
        mu=mu if mu is not None else 0.005,
        gap_check_period=(cfg.stop.gap_check_period
                          if cfg.stop is not None else 100),
        out_dir=out_dir or cfg.out or "results",
        schedule_kind=schedule_kind or "practical",
    )
    summary = run_experiment(exp)
    _echo_summary(summary, exp.out_dir)


@main.command("gen-data")
@click.option("--n-samples", "-k", type=int, default=1000)
@click.option("--dim", "-d", type=int, default=100)
@click.option("--seed", type=int, default=0)
@click.option("--noise-var", type=float, default=1e-3)
@click.option("--out", "out_path", type=click.Path(), default="dataset.csv",
              help="Output CSV path.")
def gen_data_cmd(n_samples, dim, seed, noise_var, out_path):
    """Write a synthetic dataset to CSV (columns f0..f{d-1},label)."""
    ds = generate_dataset(n_samples=n_samples, dim=dim, seed=seed,
                          noise_var=noise_var)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i}" for i in range(dim)] + ["label"])
        for row, label in zip(ds.features, ds.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])
    click.echo(f"wrote {n_samples} samples of dimension {dim} to {out_path}")


@main.command("solve")
@common_options
def solve_cmd(config_path, seed, seeds_text, out_dir, solver, iters, q_batch,
              mu, schedule_kind):
    """Run from a config file (the [run] section names a toy problem)."""
    if config_path is None:
        raise ConfigurationError("solve requires --config")
    cfg = parse_run_config(config_path)
    if cfg.problem is None:
        raise ConfigurationError(
            "the [run] section must name a problem (a toy name)"
        )
    toy = make_toy(cfg.problem)
    kinds = [solver or cfg.solver]
    seeds = _resolve_seeds(cfg, seed, seeds_text)
    stop = _stop_rule(cfg, iters, default_iters=1000)
    out = out_dir or cfg.out or "results"
    factory = _toy_schedule_factory(toy, cfg, schedule_kind, q_batch, mu)
    summary = run_toy(cfg.problem, kinds, seeds, factory, stop, out)
    _echo_summary(summary, out)


def _echo_summary(summary, out_dir):
    for kind, stats in summary.get("by_solver", {}).items():
        gap = stats.get("final_gap", {})
        med = gap.get("median")
        med_text = f"{med:.6g}" if med is not None else "n/a"
        click.echo(f"{kind}: median final gap {med_text} "
                   f"over {gap.get('n', 0)} trial(s)")
    click.echo(f"artifacts in {out_dir}/")


def entry():
    try:
        main(standalone_mode=True)
    except ConfigurationError as err:
        click.echo(f"configuration error: {err}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    entry()
