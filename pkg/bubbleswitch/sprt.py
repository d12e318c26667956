"""
Wald's sequential probability ratio test between Wigner's and the friend's
predictions, with the closed-form minimum number of runs.
"""

import logging

from collections import namedtuple
from math import ceil, inf, log

from .errors import ConfigError, SprtError
from .protocol import half_angle, published_probabilities
from .settings import ACCEPT_FRIEND, ACCEPT_WIGNER, CONTINUE


LOGGER = logging.getLogger(__name__)

DIVERGES = 'diverges'

# outcome labels counted as n0 and n1
OUTCOME_INDEX = {0: 0, 1: 1, '0': 0, '1': 1,
                 'omega0': 0, 'omega1': 1, 'phi0': 0, 'phi1': 1}


class SprtState(namedtuple('SprtState', ['log_likelihood', 'n0', 'n1', 'epsilon', 'upper', 'lower', 'decision'])):
    '''Cumulative log-likelihood ratio log(p^W/p^F), outcome counts and decision.
       The ratio saturates to ±inf when one hypothesis rules an outcome out.'''
    __slots__ = ()

    @property
    def runs(self):
        return self.n0 + self.n1

    @property
    def decided(self):
        return self.decision != CONTINUE


def _check_epsilon(epsilon):
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 0.5:
        raise ConfigError('epsilon must lie in (0, 1/2), got %s' % epsilon)
    return epsilon


def thresholds(epsilon):
    'Upper and lower decision thresholds ±log[(1 − ε)/ε]'
    epsilon = _check_epsilon(epsilon)
    upper = log((1 - epsilon) / epsilon)
    return upper, -upper


def sprt_init(epsilon):
    'Fresh test with zero evidence'
    upper, lower = thresholds(epsilon)
    return SprtState(0.0, 0, 0, float(epsilon), upper, lower, CONTINUE)


def outcome_index(outcome):
    'Map an outcome label or bit to 0 or 1'
    try:
        return OUTCOME_INDEX[outcome]
    except (KeyError, TypeError):
        raise SprtError('unknown outcome: %r' % (outcome,)) from None


def sprt_update(state, outcome, p_wigner, p_friend):
    'Add the log-likelihood ratio of one observed outcome'
    if state.decided:
        raise SprtError('test already decided: %s' % state.decision)
    index = outcome_index(outcome)
    if not (0.0 <= p_wigner <= 1.0 and 0.0 <= p_friend <= 1.0):
        raise SprtError('probabilities must lie in [0, 1]: %s, %s' % (p_wigner, p_friend))
    if p_wigner == 0.0 and p_friend == 0.0:
        raise SprtError('outcome %s is impossible under both predictions' % (outcome,))
    if p_wigner == 0.0:
        increment = -inf
    elif p_friend == 0.0:
        increment = inf
    else:
        increment = log(p_wigner / p_friend)
    value = state.log_likelihood + increment
    if value >= state.upper:
        decision = ACCEPT_WIGNER
    elif value <= state.lower:
        decision = ACCEPT_FRIEND
    else:
        decision = CONTINUE
    return state._replace(log_likelihood=value,
                          n0=state.n0 + (index == 0), n1=state.n1 + (index == 1),
                          decision=decision)


def min_runs_to_accept_wigner(theta, epsilon):
    '''Smallest n with n·log[1 + cos(πθ/2)] ≥ log[(1 − ε)/ε],
       or DIVERGES when the predictions coincide'''
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise ConfigError('theta must lie in [0, 1], got %s' % theta)
    upper, _ = thresholds(epsilon)
    _, c = half_angle(theta)
    step = log(1 + c)
    if step <= 0.0:
        return DIVERGES
    runs = max(1, ceil(upper / step))
    # guard the ceiling against rounding on either side
    while runs > 1 and (runs - 1) * step >= upper:
        runs -= 1
    while runs * step < upper:
        runs += 1
    return runs


def sprt_trace(outcomes, theta, epsilon, wigner=None, friend=None):
    '''States after each outcome of an explicit M_W sequence, up to the decision.
       The predictions default to the closed forms for θ.'''
    wigner = wigner or published_probabilities('wigner', 'M_W', theta)
    friend = friend or published_probabilities('friend', 'M_W', theta)
    labels = list(wigner)
    state = sprt_init(epsilon)
    trace = []
    for outcome in outcomes:
        label = labels[outcome_index(outcome)]
        state = sprt_update(state, label, wigner[label], friend[label])
        trace.append(state)
        if state.decided:
            LOGGER.debug('trace decided %s at step %s', state.decision, state.runs)
            break
    return trace


def first_crossing(theta, epsilon, limit=100000):
    'Index of the run at which an all-ω0 sequence decides, None if it never does'
    wigner = published_probabilities('wigner', 'M_W', theta)
    friend = published_probabilities('friend', 'M_W', theta)
    state = sprt_init(epsilon)
    for step in range(1, limit + 1):
        state = sprt_update(state, 'omega0', wigner['omega0'], friend['omega0'])
        if state.decided:
            return step
    return None
