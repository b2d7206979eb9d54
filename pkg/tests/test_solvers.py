import math

import numpy as np
import pytest
from sklearn.base import clone

from zominimax import (
    Ball,
    BlackBoxObjective,
    Box,
    ConfigurationError,
    ConstantSchedule,
    FOAGP,
    FOMinMax,
    IterationParams,
    L1Term,
    MatchedSingleBlockSchedule,
    MinimaxProblem,
    OracleError,
    PracticalSchedule,
    SolverState,
    StopRule,
    ZOAGP,
    ZOBAPG,
    ZOMinMax,
    default_schedule,
    fo_agp_run,
    fo_agp_step,
    fo_minmax_run,
    run,
    step_query_cost,
    zo_agp_step,
    zo_bapg_step,
    zo_minmax_run,
)

from conftest import make_quadratic_problem


def make_recording_problem(dim_x=2, dim_y=2, calls=None, h=None, sets_x=None):
    def fn(x, y):
        if calls is not None:
            calls.append((x.copy(), y.copy()))
        return float(x @ x + x @ y - y @ y)

    obj = BlackBoxObjective(fn, dim_x, dim_y)
    return MinimaxProblem(
        obj,
        sets_x if sets_x is not None else Box(-1.0, 1.0, dim=dim_x),
        Box(-1.0, 1.0, dim=dim_y),
        h=h,
    )


def make_block_problem(seed=1, weight=0.05, box=1.5):
    rng = np.random.default_rng(seed)
    A = rng.uniform(-1, 1, (2, 2))

    def fn(x, y):
        return float(0.5 * x @ x + x @ A @ y - 0.5 * y @ y)

    obj = BlackBoxObjective(fn, 2, 2)
    return MinimaxProblem(
        obj,
        [Box(-box, box, dim=1), Box(-box, box, dim=1)],
        Box(-box, box, dim=2),
        h=L1Term(weight),
        grad_x=lambda x, y: x + A @ y,
        grad_y=lambda x, y: A.T @ x - y,
    )


PARAMS = IterationParams(alpha=0.1, tau=10.0, beta=0.1, eta=0.05,
                         mu_x=1e-3, mu_y=1e-3, q_x=4, q_y=3)


# ---------------------------------------------------------------------------
# step mechanics

def test_y_estimate_taken_at_updated_x():
    calls = []
    problem = make_recording_problem(calls=calls)
    state0 = SolverState(0, problem.init_x(), problem.init_y())
    state1 = zo_agp_step(state0, problem, PARAMS, seed=7)
    assert state1.t == 1
    assert len(calls) == (PARAMS.q_x + 1) + (PARAMS.q_y + 1)
    x_phase, y_phase = calls[:5], calls[5:]
    # x phase: base point first, y pinned at the old iterate throughout
    assert np.array_equal(x_phase[0][0], state0.x)
    for _, y in x_phase:
        assert np.array_equal(y, state0.y)
    # y phase: every query sits at the new x, base y first
    assert np.array_equal(y_phase[0][1], state0.y)
    for x, _ in y_phase:
        assert np.array_equal(x, state1.x)


def test_block_sweep_uses_freshly_updated_blocks():
    calls = []
    problem = make_recording_problem(
        calls=calls, sets_x=[Box(-1.0, 1.0, dim=1), Box(-1.0, 1.0, dim=1)])
    state0 = SolverState(0, problem.x_blocks(problem.init_x()),
                         problem.init_y())
    state1 = zo_bapg_step(state0, problem, PARAMS, seed=3,
                          gammas=np.zeros(2))
    per_block = PARAMS.q_x + 1
    assert len(calls) == 2 * per_block + (PARAMS.q_y + 1)
    block0, block1, y_phase = (calls[:per_block],
                               calls[per_block:2 * per_block],
                               calls[2 * per_block:])
    # while block 0 is estimated, block 1 still holds its old value
    for x, _ in block0:
        assert x[1] == state0.x.block(1)[0]
    # block 1's estimate already sees the updated block 0
    new_b0 = state1.x.block(0)[0]
    assert new_b0 != state0.x.block(0)[0]
    for x, _ in block1:
        assert x[0] == new_b0
    for x, _ in y_phase:
        assert np.array_equal(x, state1.x.concat())


def test_first_order_step_matches_hand_rolled_update():
    problem, A = make_quadratic_problem(seed=5)
    x0 = np.array([1.0, 0.5])
    y0 = np.array([0.25, -0.5])
    state = fo_agp_step(SolverState(0, x0, y0), problem, PARAMS)
    x1 = np.clip(x0 - PARAMS.alpha * (x0 + A @ y0), -2.0, 2.0)
    y1 = np.clip(y0 + PARAMS.beta * ((A.T @ x1 - y0) - PARAMS.eta * y0),
                 -2.0, 2.0)
    assert np.array_equal(state.x, x1)
    assert np.array_equal(state.y, y1)


def test_iterates_stay_feasible():
    problem = make_recording_problem()
    problem.set_y = Ball(np.zeros(2), 0.5)
    result = run("zo-agp", problem,
                 ConstantSchedule(alpha=0.3, beta=0.5, q_x=2, q_y=2),
                 StopRule(max_iters=40), seed=11, gap_oracle="none")
    assert problem.sets_x[0].contains(result.x)
    assert np.linalg.norm(result.y) <= 0.5 + 1e-12


# ---------------------------------------------------------------------------
# query accounting

def test_step_query_cost_by_kind():
    p = PARAMS
    assert step_query_cost("zo-agp", p) == 5 + 4
    assert step_query_cost("zo-minmax", p) == 5 + 4
    assert step_query_cost("zo-bapg", p, n_blocks=3) == 3 * 5 + 4
    assert step_query_cost("fo-agp", p) == 0
    assert step_query_cost("fo-minmax", p) == 0


def test_ledger_counts_each_phase_exactly():
    problem = make_recording_problem()
    sched = ConstantSchedule(alpha=0.05, beta=0.05, q_x=7, q_y=3)
    result = run("zo-agp", problem, sched, StopRule(max_iters=5), seed=0,
                 gap_oracle="none", record_values=False)
    assert result.ledger.per_phase == {"x-estimation": 5 * 8,
                                       "y-estimation": 5 * 4}
    assert result.ledger.algorithm_total == 60
    assert result.trace[-1].queries == 60


def test_block_solver_query_count_and_value_queries_stay_diagnostic():
    problem = make_block_problem()
    sched = ConstantSchedule(alpha=0.05, beta=0.05, q_x=6, q_y=2)
    result = run("zo-bapg", problem, sched,
                 StopRule(max_iters=4, gap_check_period=2), seed=0,
                 gap_oracle="none")
    per_iter = 2 * 7 + 3
    assert result.ledger.per_phase["x-estimation"] == 4 * 2 * 7
    assert result.ledger.per_phase["y-estimation"] == 4 * 3
    assert result.ledger.algorithm_total == 4 * per_iter
    # objective values for the trace are bookkept separately
    assert result.ledger.per_phase["diagnostics"] == len(result.trace)
    assert [r.queries for r in result.trace] == [2 * per_iter, 4 * per_iter]


# ---------------------------------------------------------------------------
# determinism

def test_same_seed_reproduces_bitwise():
    results = []
    for _ in range(2):
        problem, _ = make_quadratic_problem(seed=2)
        results.append(run("zo-agp", problem, PracticalSchedule(q_x=4, q_y=4),
                           StopRule(max_iters=30, gap_check_period=10),
                           seed=42))
    a, b = results
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
    for ra, rb in zip(a.trace, b.trace):
        assert (ra.t, ra.queries, ra.f_value, ra.gap_total, ra.gap_x,
                ra.gap_y) == (rb.t, rb.queries, rb.f_value, rb.gap_total,
                              rb.gap_x, rb.gap_y)


def test_different_seeds_diverge():
    outs = []
    for seed in (0, 1):
        problem, _ = make_quadratic_problem(seed=2)
        outs.append(run("zo-agp", problem, PracticalSchedule(q_x=2, q_y=2),
                        StopRule(max_iters=10), seed=seed,
                        gap_oracle="none").x)
    assert not np.array_equal(outs[0], outs[1])


# ---------------------------------------------------------------------------
# stopping

def test_stop_rule_validation():
    with pytest.raises(ConfigurationError):
        StopRule()
    with pytest.raises(ConfigurationError):
        StopRule(max_iters=0)
    with pytest.raises(ConfigurationError):
        StopRule(max_iters=5, gap_threshold=-1.0)
    with pytest.raises(ConfigurationError):
        StopRule(max_iters=5, gap_check_period=0)


def test_max_queries_respected_at_boundary():
    sched = ConstantSchedule(alpha=0.05, beta=0.05, q_x=4, q_y=4)  # 10/iter
    for budget, iters in ((30, 3), (29, 2), (0, 0)):
        problem = make_recording_problem()
        result = run("zo-agp", problem, sched,
                     StopRule(max_queries=budget), seed=0,
                     gap_oracle="none", record_values=False)
        assert result.n_iters == iters
        assert result.stop_reason == "max_queries"
        assert result.ledger.algorithm_total == 10 * iters
    assert result.trace == []  # the zero-iteration run records nothing


def test_gap_threshold_stops_on_a_check_iteration():
    def fn(x, y):
        return float(0.5 * x @ x + x @ y - 0.5 * y @ y)

    obj = BlackBoxObjective(fn, 2, 2)
    problem = MinimaxProblem(
        obj, Box(0.5, 2.0, dim=2), Box(-2.0, 2.0, dim=2),
        grad_x=lambda x, y: x + y, grad_y=lambda x, y: x - y,
    )
    result = run("fo-agp", problem, PracticalSchedule(),
                 StopRule(max_iters=20000, gap_threshold=1e-2,
                          gap_check_period=5))
    assert result.stop_reason == "gap_threshold"
    assert result.n_iters % 5 == 0
    assert result.final_gap.total <= 1e-2


def test_gap_threshold_without_oracle_is_rejected():
    problem = make_recording_problem()
    with pytest.raises(ConfigurationError, match="gap oracle"):
        run("zo-agp", problem, stop=StopRule(max_iters=5, gap_threshold=0.1),
            gap_oracle="none")


def test_trace_cadence_and_final_record():
    for iters, expected in ((25, [10, 20, 25]), (30, [10, 20, 30])):
        problem, _ = make_quadratic_problem()
        result = fo_agp_run(problem,
                            stop=StopRule(max_iters=iters,
                                          gap_check_period=10))
        assert [r.t for r in result.trace] == expected
        assert all(np.isfinite(r.f_value) for r in result.trace)
        assert all(np.isfinite(r.gap_total) for r in result.trace)


def test_record_values_off_leaves_nan_values():
    problem, _ = make_quadratic_problem()
    result = fo_agp_run(problem, stop=StopRule(max_iters=10),
                        record_values=False)
    assert all(math.isnan(r.f_value) for r in result.trace)
    assert problem.objective.query_count == 0


def test_no_gap_oracle_leaves_nan_gaps():
    problem = make_recording_problem()
    result = run("zo-agp", problem,
                 ConstantSchedule(alpha=0.05, beta=0.05, q_x=2, q_y=2),
                 StopRule(max_iters=5), gap_oracle="none")
    assert all(math.isnan(r.gap_total) for r in result.trace)
    assert result.final_gap is None


# ---------------------------------------------------------------------------
# reductions between solvers

def test_one_block_composite_solver_reduces_to_projected_variant():
    runs = []
    for kind in ("zo-agp", "zo-bapg"):
        problem, _ = make_quadratic_problem(seed=3)
        sched = PracticalSchedule(q_x=3, q_y=3)
        if kind == "zo-agp":
            sched = MatchedSingleBlockSchedule(sched)
        runs.append(run(kind, problem, sched,
                        StopRule(max_iters=60, gap_check_period=20), seed=9,
                        gap_oracle="none"))
    agp, bapg = runs
    assert np.array_equal(agp.x, bapg.x)
    assert np.array_equal(agp.y, bapg.y)
    assert [r.f_value for r in agp.trace] == [r.f_value for r in bapg.trace]


def test_unregularized_variant_is_zero_eta_run():
    runs = []
    for kind in ("zo-minmax", "zo-agp"):
        problem, _ = make_quadratic_problem(seed=4)
        result = run(kind, problem,
                     ConstantSchedule(alpha=0.02, beta=0.05, eta=0.0,
                                      q_x=3, q_y=3),
                     StopRule(max_iters=40), seed=5, gap_oracle="none")
        runs.append(result)
    assert np.array_equal(runs[0].x, runs[1].x)
    assert np.array_equal(runs[0].y, runs[1].y)


def test_minmax_kinds_ignore_schedule_eta():
    runs = []
    for sched in (ConstantSchedule(alpha=0.02, beta=0.05, eta=0.7,
                                   q_x=2, q_y=2),
                  ConstantSchedule(alpha=0.02, beta=0.05, eta=0.0,
                                   q_x=2, q_y=2)):
        problem, _ = make_quadratic_problem(seed=6)
        runs.append(run("zo-minmax", problem, sched, StopRule(max_iters=15),
                        seed=1, gap_oracle="none"))
    assert np.array_equal(runs[0].y, runs[1].y)


def test_run_aliases_set_kind():
    for alias, kind in ((zo_minmax_run, "zo-minmax"),
                        (fo_agp_run, "fo-agp"),
                        (fo_minmax_run, "fo-minmax")):
        problem, _ = make_quadratic_problem()
        result = alias(problem, stop=StopRule(max_iters=3),
                       gap_oracle="none")
        assert result.kind == kind
        assert result.n_iters == 3


def test_default_schedules_by_kind():
    assert isinstance(default_schedule("zo-agp"), PracticalSchedule)
    const = default_schedule("fo-minmax")
    assert isinstance(const, ConstantSchedule)
    assert (const.alpha, const.beta) == (0.02, 0.05)


# ---------------------------------------------------------------------------
# block solver on a composite problem

def test_block_solver_handles_l1_and_offsets():
    problem = make_block_problem(weight=0.4)
    result = run("zo-bapg", problem, PracticalSchedule(q_x=8, q_y=8),
                 StopRule(max_iters=400, gap_check_period=100), seed=2,
                 gammas=[0.5, 1.0])
    assert result.x_blocks.n_blocks == 2
    assert np.array_equal(result.x_blocks.concat(), result.x)
    assert all(abs(v) <= 1.5 for v in result.x)
    # a heavy enough shrinkage term pins the solution at the origin
    assert np.max(np.abs(result.x)) < 0.05
    assert np.isfinite(result.final_gap.total)
    assert result.final_gap_regularized is not None


def test_regularized_gap_mode_reports_both_flavors():
    outs = {}
    for mode in ("standard", "regularized"):
        problem, _ = make_quadratic_problem(seed=8)
        outs[mode] = run("fo-agp", problem, PracticalSchedule(),
                         StopRule(max_iters=50), gap_mode=mode)
    for result in outs.values():
        assert result.final_gap.mode == "standard"
        assert result.final_gap_regularized.mode == "regularized"
    assert outs["standard"].final_gap.total == pytest.approx(
        outs["regularized"].final_gap.total)
    # the trace follows the requested flavor
    assert outs["regularized"].trace[-1].gap_total == pytest.approx(
        outs["regularized"].final_gap_regularized.total)


# ---------------------------------------------------------------------------
# validation and failure paths

def test_run_rejects_bad_configurations(quadratic_problem):
    problem = quadratic_problem
    with pytest.raises(ConfigurationError, match="unknown solver"):
        run("sgd", problem)
    with pytest.raises(ConfigurationError, match="MinimaxProblem"):
        run("zo-agp", object())
    with pytest.raises(ConfigurationError, match="zo-bapg"):
        run("zo-agp", make_block_problem())
    with pytest.raises(ConfigurationError, match="composite"):
        run("zo-agp", make_recording_problem(h=L1Term(0.1)))
    with pytest.raises(ConfigurationError, match="zo-bapg only"):
        run("zo-agp", problem, gammas=[0.1])
    with pytest.raises(ConfigurationError, match="offsets"):
        run("zo-bapg", make_block_problem(), gammas=[0.1])
    with pytest.raises(ConfigurationError, match="offsets"):
        run("zo-bapg", make_block_problem(), gammas=[-0.1, 0.2])
    with pytest.raises(ConfigurationError, match="analytic"):
        run("fo-agp", make_recording_problem())
    with pytest.raises(ConfigurationError, match="gap mode"):
        run("zo-agp", problem, gap_mode="fancy")
    with pytest.raises(ConfigurationError, match="gap oracle"):
        run("zo-agp", problem, gap_oracle="exact")


def test_oracle_failure_carries_last_good_state():
    count = {"n": 0}

    def fn(x, y):
        count["n"] += 1
        return float("nan") if count["n"] > 25 else float(x @ x - y @ y)

    obj = BlackBoxObjective(fn, 2, 2)
    problem = MinimaxProblem(obj, Box(-1, 1, dim=2), Box(-1, 1, dim=2))
    sched = ConstantSchedule(alpha=0.05, beta=0.05, q_x=4, q_y=3)  # 9/iter
    with pytest.raises(OracleError) as excinfo:
        run("zo-agp", problem, sched, StopRule(max_iters=10), seed=0,
            gap_oracle="none", record_values=False)
    err = excinfo.value
    assert err.state is not None and err.state.t == 2
    assert err.x is not None and err.y is not None


# ---------------------------------------------------------------------------
# estimator interface

def test_estimator_matches_functional_run():
    problem, _ = make_quadratic_problem(seed=7)
    est = ZOAGP(schedule=PracticalSchedule(q_x=3, q_y=3),
                stop=StopRule(max_iters=20), seed=13)
    assert est.fit(problem) is est
    fresh, _ = make_quadratic_problem(seed=7)
    reference = run("zo-agp", fresh, PracticalSchedule(q_x=3, q_y=3),
                    StopRule(max_iters=20), seed=13)
    assert np.array_equal(est.x_, reference.x)
    assert np.array_equal(est.y_, reference.y)
    assert est.n_iters_ == 20
    assert est.stop_reason_ == "max_iters"
    assert est.final_gap_.total == reference.final_gap.total
    assert est.ledger_.algorithm_total == reference.ledger.algorithm_total
    assert len(est.trace_) == len(reference.trace)


def test_estimator_params_round_trip_through_clone():
    est = ZOBAPG(stop=StopRule(max_iters=5), seed=3, gammas=[0.1, 0.2],
                 record_values=False)
    params = est.get_params()
    assert params["seed"] == 3
    assert params["gammas"] == [0.1, 0.2]
    twin = clone(est)
    assert twin.get_params() == params
    assert not hasattr(twin, "x_")


def test_each_estimator_kind_fits(quadratic_problem):
    for cls in (ZOMinMax, FOAGP, FOMinMax):
        problem, _ = make_quadratic_problem(seed=9)
        est = cls(stop=StopRule(max_iters=5), seed=0)
        est.fit(problem)
        assert est.result_.kind == cls.kind
        assert est.x_.shape == (2,)
