"""
The bubble switching game: rounds with a random measurement choice,
predictions committed to a ledger, outcome sampling and referees deciding
through the sequential test.
"""

import csv
import io
import logging

from collections import Counter, namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ConfigError
from .ledger import Ledger, canonical_bytes, canonical_json
from .protocol import (DEFAULT_PROTOCOL, ProtocolConfig, friend_collapse, predict,
                       wigner_state_after_measurement)
from .qstate import sample_outcome as born_sample
from .settings import (ACCEPT_FRIEND, ACCEPT_WIGNER, CONTINUE, DEFAULT_CONFIG, ORACLE_MODES, OUTCOMES,
                       POLICIES, PREDICTION_MODES, RECORDS, SWEEP_THREADS)
from .sprt import outcome_index, sprt_init, sprt_update


LOGGER = logging.getLogger(__name__)

MAX_SEED = 2 ** 64


class GameConfig(namedtuple('GameConfig', ['protocol', 'epsilon', 'measurement_policy', 'prediction_mode',
                                           'oracle_mode', 'seed', 'max_rounds', 'conditional'])):
    '''Everything a session depends on; the seed fixes every random choice.
       conditional=False switches the friend's state-derived M_F prediction
       from their held record to the whole of Ψ4^F.'''
    __slots__ = ()

    def __new__(cls, protocol=DEFAULT_PROTOCOL, epsilon=None, measurement_policy='always_MW',
                prediction_mode='as-published', oracle_mode='bubble-relative', seed=0,
                max_rounds=None, conditional=True, config=DEFAULT_CONFIG):
        if epsilon is None:
            epsilon = config.getfloat('DEFAULT', 'EPSILON')
        if max_rounds is None:
            max_rounds = config.getint('DEFAULT', 'MAX_ROUNDS')
        if not isinstance(protocol, ProtocolConfig):
            raise ConfigError('protocol must be a ProtocolConfig')
        epsilon = float(epsilon)
        if not 0.0 < epsilon < 0.5:
            raise ConfigError('epsilon must lie in (0, 1/2), got %s' % epsilon)
        if measurement_policy not in POLICIES:
            raise ConfigError('unknown measurement policy: %s' % measurement_policy)
        if prediction_mode not in PREDICTION_MODES:
            raise ConfigError('unknown prediction mode: %s' % prediction_mode)
        if oracle_mode not in ORACLE_MODES:
            raise ConfigError('unknown oracle: %s' % oracle_mode)
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < MAX_SEED:
            raise ConfigError('seed must be an unsigned 64-bit integer, got %r' % (seed,))
        if int(max_rounds) < 1:
            raise ConfigError('max_rounds must be positive, got %s' % max_rounds)
        return super().__new__(cls, protocol, epsilon, measurement_policy, prediction_mode,
                               oracle_mode, int(seed), int(max_rounds), bool(conditional))

    @property
    def theta(self):
        return self.protocol.theta

    def to_dict(self):
        'Serializable form'
        protocol = self.protocol
        return {
            'theta': protocol.theta,
            'alpha': [protocol.alpha.real, protocol.alpha.imag],
            'beta': [protocol.beta.real, protocol.beta.imag],
            'include_ancilla': protocol.include_ancilla,
            'include_fprime': protocol.include_fprime,
            'force_swap': protocol.force_swap,
            'epsilon': self.epsilon,
            'measurement_policy': self.measurement_policy,
            'prediction_mode': self.prediction_mode,
            'oracle_mode': self.oracle_mode,
            'seed': self.seed,
            'max_rounds': self.max_rounds,
            'conditional': self.conditional,
        }


class RoundLog(namedtuple('RoundLog', ['round_index', 'chosen_measurement', 'friend_record',
                                       'wigner_prediction', 'friend_prediction', 'outcome',
                                       'llr_after', 'decision_after'])):
    "One round as seen by the referees, plus the friend's private record."
    __slots__ = ()

    def public(self):
        'Serializable form without the friend record'
        return {
            'round': self.round_index,
            'measurement': self.chosen_measurement,
            'wigner': prediction_message(self.wigner_prediction),
            'friend': prediction_message(self.friend_prediction),
            'outcome': self.outcome,
            'llr': self.llr_after,
            'decision': self.decision_after,
        }

    def messages(self):
        return inter_bubble_messages(self.round_index, self.chosen_measurement,
                                     self.wigner_prediction, self.friend_prediction)


def round_rng(seed, round_index):
    'Generator for one round: PCG64 on the seed sequence (seed, spawn key (round,))'
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(round_index,))))


def prediction_message(prediction):
    'What an observer writes down and hands to a referee'
    return {
        'observer': prediction.observer,
        'measurement': prediction.measurement,
        'mode': prediction.mode,
        'theta': prediction.theta,
        'probabilities': prediction.as_dict(),
    }


def inter_bubble_messages(round_index, measurement, wigner_prediction, friend_prediction):
    '''Serialized messages crossing a bubble boundary: the measurement choice
       and the prediction of the observer outside the measuring bubble'''
    outside = friend_prediction if measurement == 'M_W' else wigner_prediction
    return [
        canonical_bytes({'kind': 'measurement', 'round': round_index, 'measurement': measurement}),
        canonical_bytes({'kind': 'prediction', 'round': round_index, 'message': prediction_message(outside)}),
    ]


def choose_measurement(policy, rng):
    'Measurement of the round; one uniform draw is consumed whatever the policy'
    draw = rng.random()
    if policy == 'always_MF':
        return 'M_F'
    if policy == 'always_MW':
        return 'M_W'
    return 'M_F' if draw < 0.5 else 'M_W'


def predictions_for(config, measurement, record):
    'Wigner\'s and the friend\'s predictions for the chosen measurement'
    wigner = predict('wigner', measurement, config.theta, config.prediction_mode, config=config.protocol)
    friend = predict('friend', measurement, config.theta, config.prediction_mode, record,
                     config=config.protocol, conditional=config.conditional)
    return wigner, friend


def sample_outcome(measurement, theta, oracle_mode, friend_record, rng, protocol=DEFAULT_PROTOCOL):
    '''Outcome of the chosen measurement. bubble-relative: M_W follows Wigner's
       state, M_F confirms the friend record; wigner-global: both follow
       Wigner's state'''
    if oracle_mode not in ORACLE_MODES:
        raise ConfigError('unknown oracle: %s' % oracle_mode)
    if oracle_mode == 'bubble-relative' and measurement == 'M_F':
        if friend_record not in RECORDS:
            raise ConfigError('the bubble-relative M_F outcome needs the friend record')
        return friend_record
    distribution = predict('wigner', measurement, theta, 'state-derived', config=protocol)
    return born_sample(distribution, rng)


class Session:
    "Mutable state of a running session: test, ledger and rounds played."
    __slots__ = ['config', 'sprt', 'ledger', 'rounds']

    def __init__(self, config):
        self.config = config
        self.sprt = sprt_init(config.epsilon)
        self.ledger = Ledger()
        self.rounds = []

    @property
    def decided(self):
        return self.sprt.decided


def play_round(config, session, rng=None, forced_outcome=None):
    '''Play one round: fresh preparation, friend measurement, measurement
       choice, committed predictions, outcome and referee update'''
    round_index = len(session.rounds) + 1
    if session.decided or round_index > config.max_rounds:
        raise ConfigError('session is over')
    if rng is None:
        rng = round_rng(config.seed, round_index)
    measurement = choose_measurement(config.measurement_policy, rng)
    record, _ = friend_collapse(wigner_state_after_measurement(config.protocol).state, rng)
    wigner, friend = predictions_for(config, measurement, record)
    session.ledger.append({'kind': 'predictions', 'round': round_index, 'measurement': measurement,
                           'wigner': prediction_message(wigner), 'friend': prediction_message(friend)})
    if forced_outcome is None:
        outcome = sample_outcome(measurement, config.theta, config.oracle_mode, record, rng, config.protocol)
    else:
        outcome = OUTCOMES[measurement][outcome_index(forced_outcome)]
    session.sprt = sprt_update(session.sprt, outcome, wigner.get(outcome), friend.get(outcome))
    session.ledger.append({'kind': 'outcome', 'round': round_index, 'outcome': outcome,
                           'llr': session.sprt.log_likelihood, 'decision': session.sprt.decision})
    log = RoundLog(round_index, measurement, record, wigner, friend, outcome,
                   session.sprt.log_likelihood, session.sprt.decision)
    session.rounds.append(log)
    LOGGER.debug('round %s: %s, record %s, outcome %s, llr %s', round_index, measurement, record,
                 outcome, session.sprt.log_likelihood)
    return log


class SessionReport:
    "All rounds of a finished session with its decision and ledger."
    __slots__ = ['config', 'rounds', 'decision', 'ledger']

    def __init__(self, config, rounds, decision, ledger):
        self.config = config
        self.rounds = list(rounds)
        self.decision = decision
        self.ledger = ledger

    @property
    def rounds_used(self):
        return len(self.rounds)

    @property
    def root(self):
        return self.ledger.root

    @property
    def log_likelihood(self):
        return self.rounds[-1].llr_after if self.rounds else 0.0

    def outcome_frequencies(self):
        'Relative outcome frequencies per measurement'
        counts = {}
        for log in self.rounds:
            counts.setdefault(log.chosen_measurement, Counter())[log.outcome] += 1
        return {measurement: {outcome: count / sum(counter.values()) for outcome, count in sorted(counter.items())}
                for measurement, counter in sorted(counts.items())}

    def summary(self):
        'One-line decision statement'
        if self.decision == CONTINUE:
            return 'undecided after %s rounds' % self.rounds_used
        return '%s at round %s' % (self.decision, self.rounds_used)

    def to_dict(self):
        rounds = []
        for log in self.rounds:
            row = log.public()
            row['friend_record'] = log.friend_record
            rounds.append(row)
        return {
            'config': self.config.to_dict(),
            'decision': self.decision,
            'rounds_used': self.rounds_used,
            'log_likelihood': self.log_likelihood,
            'frequencies': self.outcome_frequencies(),
            'ledger_root': self.root,
            'rounds': rounds,
            'ledger': self.ledger.to_list(),
        }

    def to_json(self):
        'Canonical JSON, stable across runs'
        return canonical_json(self.to_dict())

    def to_csv(self):
        'One row per round'
        output = io.StringIO()
        writer = csv.writer(output, lineterminator='\n')
        writer.writerow(['round', 'measurement', 'friend_record', 'outcome', 'pW', 'pF', 'llr', 'decision'])
        for log in self.rounds:
            writer.writerow([log.round_index, log.chosen_measurement, log.friend_record, log.outcome,
                             repr(log.wigner_prediction.get(log.outcome)),
                             repr(log.friend_prediction.get(log.outcome)),
                             repr(log.llr_after), log.decision_after])
        return output.getvalue()


def _warn_about(config):
    if config.prediction_mode == 'state-derived' and config.theta > 0 and config.measurement_policy != 'always_MF':
        LOGGER.warning('state-derived friend predictions for M_W depend on their record when theta > 0')


def run_session(config, outcomes=None):
    '''Play rounds until the referee decides or max_rounds is reached.
       With outcomes, sampling is replaced by the given sequence (replay).'''
    _warn_about(config)
    session = Session(config)
    outcomes = list(outcomes) if outcomes is not None else None
    limit = config.max_rounds if outcomes is None else min(config.max_rounds, len(outcomes))
    while not session.decided and len(session.rounds) < limit:
        forced = outcomes[len(session.rounds)] if outcomes is not None else None
        play_round(config, session, forced_outcome=forced)
    report = SessionReport(config, session.rounds, session.sprt.decision, session.ledger)
    if report.decision == CONTINUE:
        LOGGER.warning('session seed %s undecided after %s rounds', config.seed, report.rounds_used)
    else:
        LOGGER.info('session seed %s: %s', config.seed, report.summary())
    return report


def replay_session(config, outcomes):
    'Session with a forced outcome sequence'
    return run_session(config, outcomes)


def run_sessions(configs, parallel=SWEEP_THREADS):
    'Independent sessions, reports returned in input order'
    with ThreadPoolExecutor(max_workers=max(1, parallel)) as executor:
        return list(executor.map(run_session, configs))


def decision_rates(reports):
    'Share of sessions deciding for each observer'
    total = len(reports) or 1
    decisions = Counter(report.decision for report in reports)
    return {decision: decisions[decision] / total for decision in (ACCEPT_WIGNER, ACCEPT_FRIEND, CONTINUE)}
