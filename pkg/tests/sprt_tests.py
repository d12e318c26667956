"""
Unit tests for the sequential probability ratio test.
"""

import logging
import sys

from math import ceil, cos, inf, log, pi, sqrt

import pytest

from hypothesis import given, settings as hsettings, strategies as st

from bubbleswitch.errors import ConfigError, SprtError
from bubbleswitch.sprt import (DIVERGES, first_crossing, min_runs_to_accept_wigner, outcome_index,
                               sprt_init, sprt_trace, sprt_update, thresholds)


logging.basicConfig(stream=sys.stdout, level=logging.DEBUG)


def test_thresholds():
    '''test decision thresholds'''
    upper, lower = thresholds(1e-3)
    assert upper == pytest.approx(log(999)) and upper == pytest.approx(6.9068, abs=1e-4)
    assert lower == -upper
    upper, _ = thresholds(0.5 - 1e-9)
    assert 0 < upper < 1e-8
    for epsilon in (0, 0.5, -0.1, 1):
        with pytest.raises(ConfigError):
            thresholds(epsilon)
    state = sprt_init(0.01)
    assert state.log_likelihood == 0.0 and state.runs == 0 and not state.decided


def test_update():
    '''test single updates'''
    state = sprt_update(sprt_init(1e-3), 'omega0', 1.0, 0.5)
    assert state.log_likelihood == pytest.approx(log(2)) and state.n0 == 1 and state.n1 == 0
    assert state.decision == 'continue'
    state = sprt_update(sprt_init(1e-3), 'omega1', 0.0, 0.5)
    assert state.log_likelihood == -inf and state.decision == 'accept_friend' and state.n1 == 1
    state = sprt_update(sprt_init(1e-3), 1, 0.5, 0.0)
    assert state.log_likelihood == inf and state.decision == 'accept_wigner'
    state = sprt_update(sprt_init(1e-3), '0', 0.3, 0.3)
    assert state.log_likelihood == 0.0 and state.decision == 'continue'
    with pytest.raises(SprtError):
        sprt_update(sprt_init(1e-3), 'omega0', 0.0, 0.0)
    with pytest.raises(SprtError):
        sprt_update(sprt_init(1e-3), 'omega0', 1.2, 0.5)
    with pytest.raises(SprtError):
        sprt_update(sprt_init(1e-3), 'omega2', 0.5, 0.5)
    decided = sprt_update(sprt_init(1e-3), 'omega1', 0.0, 0.5)
    with pytest.raises(SprtError):
        sprt_update(decided, 'omega0', 1.0, 0.5)
    assert outcome_index('phi1') == 1 and outcome_index(0) == 0


def test_min_runs():
    '''test the closed-form minimum number of runs'''
    assert min_runs_to_accept_wigner(0.0, 1e-3) == 10
    assert min_runs_to_accept_wigner(0.5, 1e-3) == 13
    assert min_runs_to_accept_wigner(0.5, 1e-3) == ceil(log(999) / log(1 + sqrt(2) / 2))
    assert min_runs_to_accept_wigner(1.0, 1e-3) == DIVERGES
    assert min_runs_to_accept_wigner(1.0, 0.2) == DIVERGES
    assert min_runs_to_accept_wigner(0.3, 1e-2) < min_runs_to_accept_wigner(0.3, 1e-3)
    with pytest.raises(ConfigError):
        min_runs_to_accept_wigner(1.1, 1e-3)
    with pytest.raises(ConfigError):
        min_runs_to_accept_wigner(0.5, 0.0)


def test_min_runs_monotonic():
    '''runs needed grow with the encoding parameter'''
    for epsilon in (1e-2, 1e-3):
        values = [min_runs_to_accept_wigner(step / 20, epsilon) for step in range(20)]
        assert values == sorted(values)


def test_trace():
    '''test explicit outcome sequences'''
    trace = sprt_trace(['0'] * 10, 0.0, 1e-3)
    assert len(trace) == 10
    assert [state.decision for state in trace[:9]] == ['continue'] * 9
    assert trace[-1].decision == 'accept_wigner'
    assert trace[8].log_likelihood == pytest.approx(9 * log(2))
    # stops at the decision
    assert len(sprt_trace(['0'] * 15, 0.0, 1e-3)) == 10
    trace = sprt_trace(['0', '0', '0', '0', '1'], 0.0, 1e-3)
    assert len(trace) == 5 and trace[-1].decision == 'accept_friend' and trace[-1].log_likelihood == -inf
    assert sprt_trace([], 0.0, 1e-3) == []
    with pytest.raises(SprtError):
        sprt_trace(['2'], 0.0, 1e-3)


@hsettings(max_examples=100, deadline=None)
@given(st.integers(0, 19), st.sampled_from([1e-2, 1e-3]))
def test_first_crossing_matches(step, epsilon):
    '''simulated crossing agrees with the closed form'''
    theta = step / 20
    assert first_crossing(theta, epsilon) == min_runs_to_accept_wigner(theta, epsilon)


@hsettings(max_examples=200, deadline=None)
@given(st.floats(0.3, 1.0), st.lists(st.sampled_from(['omega0', 'omega1']), max_size=40),
       st.sampled_from([1e-2, 1e-3, 1e-6]))
def test_trace_is_exact_sum(theta, outcomes, epsilon):
    '''the statistic is n0·log(1 + c) + n1·log(1 − c) after every step'''
    c = cos(pi * theta / 2)
    trace = sprt_trace(outcomes, theta, epsilon)
    assert len(trace) <= len(outcomes)
    for step, state in enumerate(trace, start=1):
        assert state.runs == step
        assert state.n0 == outcomes[:step].count('omega0') and state.n1 == outcomes[:step].count('omega1')
        expected = state.n0 * log(1 + c) + state.n1 * log(1 - c)
        assert state.log_likelihood == pytest.approx(expected, abs=1e-9)
        upper, lower = thresholds(epsilon)
        if state.decided:
            assert state.log_likelihood >= upper or state.log_likelihood <= lower
        else:
            assert lower < state.log_likelihood < upper
    if len(trace) < len(outcomes):
        assert trace[-1].decided

def test_no_crossing():
    '''coinciding predictions never decide'''
    assert first_crossing(1.0, 1e-3, limit=1000) is None


if __name__ == '__main__':
    test_thresholds()
    test_update()
    test_min_runs()
    test_min_runs_monotonic()
    test_trace()
    test_first_crossing_matches()
    test_trace_is_exact_sum()
    test_no_crossing()
