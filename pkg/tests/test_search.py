"""Search drivers: phases, traces, determinism, audit."""

import pytest

import cimwalk.search as search_mod
from cimwalk.graphs import Dag, mec_of
from cimwalk.moves import V_STRUCTURE_ADDITION
from cimwalk.scoring import SufficientStats
from cimwalk.search import (BEST_IMPROVEMENT, FIRST_IMPROVEMENT,
                            RECURRENT_PHASED, SearchConfig, SearchError,
                            edge_phase, greedy_cim,
                            recurrent_phased_greedy_cim, skeletal_greedy_cim,
                            turn_phase)
from cimwalk.simulate import assign_weights, make_rng, random_dag, sample

CHAIN_COV = [[1.0, 1.0, 1.0], [1.0, 2.0, 2.0], [1.0, 2.0, 3.0]]
COLLIDER_COV = [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 3.0]]

CHAIN_MEC = mec_of(Dag.from_arcs(3, [(0, 1), (1, 2)]))
COLLIDER_MEC = mec_of(Dag.from_arcs(3, [(0, 2), (1, 2)]))


def _stats(cov, n=1000):
    return SufficientStats.from_covariance(cov, n=n)


def test_turn_phase_finds_the_collider_in_one_step():
    start = mec_of(Dag.from_arcs(3, [(0, 2), (2, 1)]))
    out, trace = turn_phase(start, _stats(COLLIDER_COV), SearchConfig())
    assert out == COLLIDER_MEC
    assert len(trace) == 1
    step = trace.steps[0]
    assert step.phase == "turn"
    assert step.move.kind == V_STRUCTURE_ADDITION
    assert step.score_after > step.score_before


def test_edge_phase_only_changes_edges():
    start = mec_of(Dag.from_arcs(3, []))
    out, trace = edge_phase(start, _stats(CHAIN_COV), SearchConfig())
    assert len(out.skeleton.edges) >= 2
    for step in trace:
        assert step.phase == "edge"


def test_greedy_recovers_collider():
    out, trace = greedy_cim(_stats(COLLIDER_COV), SearchConfig())
    assert out == COLLIDER_MEC
    assert all(s.score_after > s.score_before for s in trace)


def test_greedy_recovers_chain_class():
    out, _ = greedy_cim(_stats(CHAIN_COV), SearchConfig())
    assert out == CHAIN_MEC


def test_greedy_on_independent_data_stays_empty():
    stats = _stats([[1.0, 0.0], [0.0, 1.0]])
    out, trace = greedy_cim(stats, SearchConfig())
    assert out == mec_of(Dag.from_arcs(2, []))
    assert len(trace) == 0


def test_strategies_agree_on_easy_instances():
    for cov in (CHAIN_COV, COLLIDER_COV):
        first, _ = greedy_cim(_stats(cov), SearchConfig(strategy=FIRST_IMPROVEMENT))
        best, _ = greedy_cim(_stats(cov), SearchConfig(strategy=BEST_IMPROVEMENT))
        assert first == best


def test_trace_is_a_running_sum():
    out, trace = greedy_cim(_stats(COLLIDER_COV), SearchConfig())
    steps = list(trace)
    for a, b in zip(steps, steps[1:]):
        assert b.score_before == a.score_after
    assert trace.to_json() == [s.to_json() for s in steps]


def test_skeletal_recovers_collider():
    out, trace = skeletal_greedy_cim(_stats(COLLIDER_COV), SearchConfig())
    assert out == COLLIDER_MEC
    for step in trace:
        assert step.phase == "turn"


def test_recurrent_recovers_chain_class():
    out, trace = recurrent_phased_greedy_cim(
        _stats(CHAIN_COV), SearchConfig(phase_mode=RECURRENT_PHASED))
    assert out == CHAIN_MEC
    for step in trace:
        assert step.phase in ("forward", "backward", "turn")
        if step.phase == "forward":
            assert not step.move.removed
        if step.phase == "backward":
            assert not step.move.added


def test_runs_are_deterministic_on_sampled_data():
    model = assign_weights(random_dag(6, 2.0, make_rng(3)), make_rng(4))
    _, stats = sample(model, 800, make_rng(5))
    first_out, first_trace = greedy_cim(stats, SearchConfig())
    second_out, second_trace = greedy_cim(stats, SearchConfig())
    assert first_out == second_out
    assert first_trace.to_json() == second_trace.to_json()


def test_subset_cap_limits_still_converge():
    out, _ = greedy_cim(_stats(CHAIN_COV), SearchConfig(subset_cap=1))
    assert out == CHAIN_MEC


def test_config_validation():
    with pytest.raises(SearchError):
        SearchConfig(strategy="steepest")
    with pytest.raises(SearchError):
        SearchConfig(phase_mode="mystery")
    with pytest.raises(SearchError):
        SearchConfig(subset_cap=0)
    with pytest.raises(SearchError):
        SearchConfig(alpha=1.5)


def test_audit_failure_raises(monkeypatch):
    monkeypatch.setattr(search_mod, "_AUDIT_EVERY", 1)
    monkeypatch.setattr(search_mod, "verify_pair", lambda *args: False)
    with pytest.raises(SearchError):
        greedy_cim(_stats(COLLIDER_COV), SearchConfig())
