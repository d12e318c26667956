"""
States, unitaries and predictions of the bubble switching protocol, in
Wigner's (unitary) and the friend's (collapse) descriptions.
"""

import logging

from collections import namedtuple
from functools import lru_cache
from math import cos, pi, sin, sqrt

import numpy as np

from .errors import BubbleSwitchError, ConfigError, LayoutError
from .qstate import (MeasurementBasis, Operator, Prediction, SubsystemLayout,
                     apply, basis_state, born_probabilities, complete_to_unitary, embed,
                     inner_product, product_state, project, sample_outcome, superpose, tensor)
from .settings import (ALGEBRA_TOL, ANCILLA, FRIEND, FRIEND_REPEAT, MEASUREMENTS, OBSERVERS, OUTCOMES,
                       PREDICTION_MODES, PROBABILITY_TOL, READY, RECORDS, SYSTEM, WIGNER)


LOGGER = logging.getLogger(__name__)

LRU_SIZE = 4096
STAGES = ('Psi0', 'Psi1', 'Psi2', 'Psi3', 'Psi4')
INV_SQRT2 = 1 / sqrt(2)

SF_LAYOUT = SubsystemLayout([SYSTEM, FRIEND])
SFW_LAYOUT = SubsystemLayout([SYSTEM, FRIEND, WIGNER])

CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=complex)


class ProtocolConfig(namedtuple('ProtocolConfig', ['theta', 'alpha', 'beta', 'include_ancilla',
                                                   'include_fprime', 'force_swap'])):
    '''Encoding parameter theta, initial qubit amplitudes and optional registers:
       the ancilla A for the memory swap and F' for the repeated measurement.'''
    __slots__ = ()

    def __new__(cls, theta=0.0, alpha=INV_SQRT2, beta=INV_SQRT2, include_ancilla=False,
                include_fprime=False, force_swap=False):
        theta = float(theta)
        if not 0.0 <= theta <= 1.0:
            raise ConfigError('theta must lie in [0, 1], got %s' % theta)
        alpha, beta = complex(alpha), complex(beta)
        if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > ALGEBRA_TOL:
            raise ConfigError('|alpha|² + |beta|² must be 1, got %s' % (abs(alpha) ** 2 + abs(beta) ** 2))
        # the forced swap needs somewhere to put the record
        include_ancilla = bool(include_ancilla or force_swap)
        return super().__new__(cls, theta, alpha, beta, include_ancilla, bool(include_fprime), bool(force_swap))

    @property
    def default_amplitudes(self):
        'True for the equal superposition the closed forms assume'
        return abs(self.alpha - INV_SQRT2) <= ALGEBRA_TOL and abs(self.beta - INV_SQRT2) <= ALGEBRA_TOL

    def layout(self):
        'S, F, W plus the optional A and F\' registers'
        labels = [SYSTEM, FRIEND, WIGNER]
        if self.include_ancilla:
            labels.append(ANCILLA)
        if self.include_fprime:
            labels.append(FRIEND_REPEAT)
        return SubsystemLayout(labels)


DEFAULT_PROTOCOL = ProtocolConfig()


class ObserverAssignment(namedtuple('ObserverAssignment', ['observer', 'state', 'stage', 'friend_record'])):
    "State assigned by one observer at one stage of the protocol."
    __slots__ = ()

    def __new__(cls, observer, state, stage, friend_record=None):
        if observer not in OBSERVERS:
            raise BubbleSwitchError('unknown observer: %s' % observer)
        if stage not in STAGES:
            raise BubbleSwitchError('unknown stage: %s' % stage)
        if observer == 'wigner' and friend_record is not None:
            raise BubbleSwitchError('Wigner has no access to the friend record')
        if observer == 'friend' and stage != 'Psi0' and friend_record not in RECORDS:
            raise BubbleSwitchError('friend assignments after the measurement need a record')
        return super().__new__(cls, observer, state, stage, friend_record)


def _check_theta(theta):
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise ConfigError('theta must lie in [0, 1], got %s' % theta)
    return theta


def _check_record(record):
    if record not in RECORDS:
        raise ConfigError('friend record must be one of %s, got %s' % (RECORDS, record))
    return RECORDS.index(record)


def half_angle(theta):
    'sin(πθ/2) and cos(πθ/2)'
    return sin(pi * theta / 2), cos(pi * theta / 2)


def _ready(layout, assignment):
    'Basis state with the given indices and every other register in its ready state'
    full = {label: READY for label in layout.labels}
    full.update(assignment)
    return basis_state(layout, full)


def initial_state(config=DEFAULT_PROTOCOL):
    '(α|↑⟩ + β|↓⟩)|φ0⟩|ω0⟩, with |R⟩_A and |φ0⟩_F\' when enabled'
    layout = config.layout()
    return superpose([(config.alpha, _ready(layout, {SYSTEM: 0})), (config.beta, _ready(layout, {SYSTEM: 1}))], normalize=True)


def measurement_unitary():
    'Controlled-NOT, control S on |↓⟩, target F'
    return Operator((SYSTEM, FRIEND), CNOT, kind='unitary', name='U_meas')


def repeat_measurement_unitary():
    "Controlled-NOT, control S, target F'"
    return Operator((SYSTEM, FRIEND_REPEAT), CNOT, kind='unitary', name='U_repeat')


def swap_unitary():
    'Exchange of the contents of A and F'
    return Operator((ANCILLA, FRIEND), SWAP, kind='unitary', name='U_swap')


def record_projector(record, target=FRIEND):
    'Projector on |φ_i⟩ of the friend register (or F\')'
    index = _check_record(record)
    matrix = np.zeros((2, 2), dtype=complex)
    matrix[index, index] = 1.0
    return Operator((target,), matrix, kind='projector', name='Pi_%s^%s' % (record, target))


def measurement_basis(measurement, layout=SFW_LAYOUT):
    '''M_W: ω0/ω1 on W; M_F: φ0/φ1 on F' if present, otherwise the z-basis of S
       labeled by the record it produces'''
    if measurement == 'M_W':
        target = WIGNER
    elif measurement == 'M_F':
        target = FRIEND_REPEAT if FRIEND_REPEAT in layout else SYSTEM
    else:
        raise ConfigError('unknown measurement: %s' % measurement)
    family = []
    for index, outcome in enumerate(OUTCOMES[measurement]):
        matrix = np.zeros((2, 2), dtype=complex)
        matrix[index, index] = 1.0
        family.append((outcome, Operator((target,), matrix, kind='projector', name='Pi_%s' % outcome)))
    return MeasurementBasis(measurement, family)


def wigner_state_after_measurement(config=DEFAULT_PROTOCOL):
    'Ψ1^W: system and friend perfectly correlated'
    return ObserverAssignment('wigner', apply(measurement_unitary(), initial_state(config)), 'Psi1')


def friend_collapse(state, rng):
    '''Sample the friend's outcome by the Born rule and return it together
       with their collapsed state assignment'''
    if isinstance(state, ObserverAssignment):
        state = state.state
    basis = MeasurementBasis('friend', [(record, record_projector(record)) for record in RECORDS])
    record = sample_outcome(born_probabilities(state, basis), rng)
    probability, collapsed = project(state, record_projector(record))
    assert probability > 0.0
    LOGGER.debug('friend observes %s (p=%.6g)', record, probability)
    return record, ObserverAssignment('friend', collapsed, 'Psi1', record)


def defining_states(theta):
    '''The unnormalized parameterized states Φ_θ^+, Φ_θ^-, φ_θ^+, φ_θ^- on S⊗F'''
    s, c = half_angle(_check_theta(theta))
    up, down = basis_state(SF_LAYOUT, {SYSTEM: 0, FRIEND: 0}), basis_state(SF_LAYOUT, {SYSTEM: 1, FRIEND: 1})
    def combine(first, second):
        return superpose([(INV_SQRT2 * first, up), (INV_SQRT2 * second, down)])
    return {
        'Phi+': combine(1 + s, c),
        'Phi-': combine(1 - s, -c),
        'phi+': combine(c, 1 - s),
        'phi-': combine(c, -(1 + s)),
    }


def interaction_pairs(theta):
    '''The two inputs on which the interaction acts non-trivially and their images'''
    states = defining_states(theta)
    omega0 = basis_state(SubsystemLayout([WIGNER]), {WIGNER: 0})
    omega1 = basis_state(SubsystemLayout([WIGNER]), {WIGNER: 1})
    first = superpose([(INV_SQRT2, tensor(states['Phi+'], omega0)), (INV_SQRT2, tensor(states['Phi-'], omega1))])
    second = superpose([(INV_SQRT2, tensor(states['phi+'], omega0)), (-INV_SQRT2, tensor(states['phi-'], omega1))])
    return [
        (basis_state(SFW_LAYOUT, {SYSTEM: 0, FRIEND: 0, WIGNER: 0}), first),
        (basis_state(SFW_LAYOUT, {SYSTEM: 1, FRIEND: 1, WIGNER: 0}), second),
    ]


@lru_cache(maxsize=LRU_SIZE)
def interaction_unitary(theta, order='canonical'):
    'U_int(θ) on S⊗F⊗W, completed from its two defining pairs'
    return complete_to_unitary(interaction_pairs(_check_theta(theta)), order=order, name='U_int(%s)' % theta)


def wigner_state_after_interaction(theta, config=DEFAULT_PROTOCOL, order='canonical'):
    'Ψ2^W: the interaction applied to Wigner\'s entangled state'
    state = apply(measurement_unitary(), initial_state(config))
    return ObserverAssignment('wigner', apply(interaction_unitary(theta, order), state), 'Psi2')


def friend_collapsed_state(record, config=DEFAULT_PROTOCOL):
    'Product state of the collapse rule for a given record'
    index = _check_record(record)
    return _ready(config.layout(), {SYSTEM: index, FRIEND: index})


def friend_state_after_interaction(theta, record, config=DEFAULT_PROTOCOL, order='canonical'):
    'Ψ2^F: the interaction applied to the friend\'s collapsed state'
    state = apply(interaction_unitary(theta, order), friend_collapsed_state(record, config))
    return ObserverAssignment('friend', state, 'Psi2', record)


def friend_state_rewritten(record, config=DEFAULT_PROTOCOL):
    '''Ψ2^F at θ = 0 written with |ω±⟩ = (|ω0⟩ ± |ω1⟩)/√2 on Wigner's side'''
    index = _check_record(record)
    layout = config.layout()
    plus, minus = (INV_SQRT2, INV_SQRT2), (INV_SQRT2, -INV_SQRT2)
    terms = []
    for branch, omega in ((0, plus if index == 0 else minus), (1, minus if index == 0 else plus)):
        factors = {label: (1, 0) for label in layout.labels}
        factors[SYSTEM] = factors[FRIEND] = (1, 0) if branch == 0 else (0, 1)
        factors[WIGNER] = omega
        terms.append((INV_SQRT2, product_state(layout, factors)))
    return superpose(terms)


def swap_memory(assignment):
    'Transfer the friend\'s record to the ancilla, leaving F in the ready state'
    if ANCILLA not in assignment.state.layout:
        raise LayoutError('memory swap needs the ancilla register')
    if assignment.stage != 'Psi2':
        raise BubbleSwitchError('memory swap expects a Psi2 assignment, got %s' % assignment.stage)
    return assignment._replace(state=apply(swap_unitary(), assignment.state), stage='Psi3')


def _with_repeat_register(config):
    return config._replace(include_fprime=True)


def _repeat(assignment, config):
    state = assignment.state
    if config.force_swap:
        state = swap_memory(assignment).state
    return assignment._replace(state=apply(repeat_measurement_unitary(), state), stage='Psi4')


def wigner_state_after_repeat(theta, config=DEFAULT_PROTOCOL, order='canonical'):
    "Ψ4^W: repeated measurement of S into F' in Wigner's description"
    config = _with_repeat_register(config)
    return _repeat(wigner_state_after_interaction(theta, config, order), config)


def friend_state_after_repeat(theta, record, config=DEFAULT_PROTOCOL, order='canonical'):
    "Ψ4^F: repeated measurement of S into F' in the friend's description"
    config = _with_repeat_register(config)
    return _repeat(friend_state_after_interaction(theta, record, config, order), config)


def state_for_prediction(observer, measurement, theta, config=DEFAULT_PROTOCOL, record=None, order='canonical'):
    '''Assignment the Born rule runs on: Ψ3 (swap enabled) or Ψ2 before M_W,
       Ψ4 before M_F'''
    if measurement == 'M_W':
        if observer == 'wigner':
            assignment = wigner_state_after_interaction(theta, config, order)
        else:
            assignment = friend_state_after_interaction(theta, record, config, order)
        if config.include_ancilla:
            assignment = swap_memory(assignment)
        return assignment
    if measurement == 'M_F':
        if observer == 'wigner':
            return wigner_state_after_repeat(theta, config, order)
        return friend_state_after_repeat(theta, record, config, order)
    raise ConfigError('unknown measurement: %s' % measurement)


def published_probabilities(observer, measurement, theta, record=None):
    'Closed-form predictions, outcome → probability'
    s, c = half_angle(_check_theta(theta))
    if observer == 'wigner' and measurement == 'M_W':
        return {'omega0': (1 + c) / 2, 'omega1': (1 - c) / 2}
    if observer == 'wigner' and measurement == 'M_F':
        return {'phi0': (1 + s * c) / 2, 'phi1': (1 - s * c) / 2}
    if observer == 'friend' and measurement == 'M_W':
        return {'omega0': 0.5, 'omega1': 0.5}
    if observer == 'friend' and measurement == 'M_F':
        index = _check_record(record)
        return {outcome: 1.0 if i == index else 0.0 for i, outcome in enumerate(OUTCOMES['M_F'])}
    raise ConfigError('unknown observer or measurement: %s %s' % (observer, measurement))


@lru_cache(maxsize=LRU_SIZE)
def _derived_prediction(observer, measurement, theta, record, config, conditional):
    assignment = state_for_prediction(observer, measurement, theta, config, record)
    state = assignment.state
    if conditional:
        # condition on the record still held in the friend's memory register
        memory = ANCILLA if config.force_swap else FRIEND
        _, state = project(state, record_projector(record, target=memory))
    return born_probabilities(state, measurement_basis(measurement, state.layout))


@lru_cache(maxsize=None)
def _warn_amplitudes(alpha, beta):
    LOGGER.warning('closed forms assume equal initial amplitudes, got alpha=%s beta=%s', alpha, beta)


def predict(observer, measurement, theta, mode='as-published', record=None,
            config=DEFAULT_PROTOCOL, conditional=True):
    '''Prediction of one observer for one measurement.
       as-published: closed forms; state-derived: Born rule on the assigned state.
       The friend's state-derived M_F prediction is conditioned on the record they
       still hold; conditional=False evaluates the whole of Ψ4^F instead.'''
    theta = _check_theta(theta)
    if mode not in PREDICTION_MODES:
        raise ConfigError('unknown prediction mode: %s' % mode)
    if observer not in OBSERVERS or measurement not in MEASUREMENTS:
        raise ConfigError('unknown observer or measurement: %s %s' % (observer, measurement))
    if observer == 'friend':
        _check_record(record)
    elif record is not None:
        raise ConfigError('Wigner predictions take no record')
    if mode == 'as-published':
        if not config.default_amplitudes:
            _warn_amplitudes(config.alpha, config.beta)
        prediction = Prediction(published_probabilities(observer, measurement, theta, record), measurement=measurement)
    else:
        conditional = bool(conditional and observer == 'friend' and measurement == 'M_F')
        prediction = _derived_prediction(observer, measurement, theta, record,
                                         config._replace(theta=theta), conditional)
    return prediction.stamped(observer=observer, theta=theta, mode=mode)


ClosedFormCheck = namedtuple('ClosedFormCheck', ['theta', 'deviation_mw', 'deviation_mf'])


class VerificationReport:
    "Outcome of a grid comparison between closed forms and Born evaluation."
    __slots__ = ['entries', 'tolerance']

    def __init__(self, entries, tolerance):
        self.entries = list(entries)
        self.tolerance = tolerance

    @property
    def max_deviation(self):
        return max((max(e.deviation_mw, e.deviation_mf) for e in self.entries), default=0.0)

    @property
    def failures(self):
        return [e for e in self.entries if max(e.deviation_mw, e.deviation_mf) > self.tolerance]

    @property
    def passed(self):
        return not self.failures


def _deviation(first, second):
    return max(abs(first.get(outcome) - second.get(outcome)) for outcome in first.outcomes)


def verify_closed_forms(theta_grid, tol=PROBABILITY_TOL):
    'Compare Wigner\'s closed forms for both measurements with the Born rule on each θ'
    entries = []
    for theta in theta_grid:
        theta = _check_theta(theta)
        deviations = [
            _deviation(predict('wigner', measurement, theta, 'as-published'),
                       predict('wigner', measurement, theta, 'state-derived'))
            for measurement in ('M_W', 'M_F')
        ]
        entries.append(ClosedFormCheck(theta, *deviations))
    report = VerificationReport(entries, tol)
    LOGGER.info('closed forms on %s points: max deviation %.3g', len(entries), report.max_deviation)
    return report


def theta_grid(points):
    'Evenly spaced grid on [0, 1]'
    if points < 1:
        raise ConfigError('grid needs at least one point')
    if points == 1:
        return [0.0]
    return [i / (points - 1) for i in range(points)]


# Identity checks, each returning the largest deviation found on the grid

def check_rewriting(grid=None):
    'Ψ2^F at θ = 0 against its |ω±⟩ form, both records'
    return max(np.max(np.abs(friend_state_after_interaction(0.0, record).state.amplitudes
                             - friend_state_rewritten(record).amplitudes))
               for record in RECORDS)


def check_ghz(grid=None):
    'Ψ4^W at θ = 0 has two amplitudes of squared magnitude 1/2'
    state = wigner_state_after_repeat(0.0).state
    weights = sorted(np.abs(state.amplitudes) ** 2, reverse=True)
    return max(abs(weights[0] - 0.5), abs(weights[1] - 0.5), sum(weights[2:]))


def check_full_leakage(grid=None):
    'θ = 1 limit: product states for the friend, perfect correlation for Wigner'
    layout = SFW_LAYOUT
    expected_wigner = superpose([(INV_SQRT2, basis_state(layout, {SYSTEM: 0, FRIEND: 0, WIGNER: 0})),
                                 (INV_SQRT2, basis_state(layout, {SYSTEM: 1, FRIEND: 1, WIGNER: 1}))])
    expected_friend = {'phi0': basis_state(layout, {SYSTEM: 0, FRIEND: 0, WIGNER: 0}),
                       'phi1': basis_state(layout, {SYSTEM: 1, FRIEND: 1, WIGNER: 1})}
    deviations = [np.max(np.abs(wigner_state_after_interaction(1.0).state.amplitudes - expected_wigner.amplitudes))]
    for record in RECORDS:
        deviations.append(np.max(np.abs(friend_state_after_interaction(1.0, record).state.amplitudes
                                        - expected_friend[record].amplitudes)))
    return max(deviations)


def check_defining_pairs(grid):
    'Unit norm and zero overlap of the two defining images'
    deviation = 0.0
    for theta in grid:
        (_, first), (_, second) = interaction_pairs(theta)
        deviation = max(deviation, abs(first.norm() - 1), abs(second.norm() - 1),
                        abs(inner_product(first, second)))
    return deviation


def check_completion_insensitivity(grid):
    'Canonical and reversed completions give the same protocol states'
    deviation = 0.0
    for theta in grid:
        pairs = [(wigner_state_after_interaction(theta, order=order).state,
                  wigner_state_after_repeat(theta, order=order).state,
                  friend_state_after_interaction(theta, 'phi0', order=order).state,
                  friend_state_after_interaction(theta, 'phi1', order=order).state)
                 for order in ('canonical', 'reversed')]
        for first, second in zip(*pairs):
            deviation = max(deviation, float(np.max(np.abs(first.amplitudes - second.amplitudes))))
    return deviation


def check_unitarity(grid):
    'Protocol unitaries embedded in the full S, F, W, A, F\' space'
    layout = ProtocolConfig(include_ancilla=True, include_fprime=True).layout()
    operators = [measurement_unitary(), repeat_measurement_unitary(), swap_unitary()]
    operators.extend(interaction_unitary(theta) for theta in grid)
    identity = np.eye(layout.total)
    return max(float(np.max(np.abs(matrix.conj().T @ matrix - identity)))
               for matrix in (embed(op, layout) for op in operators))


def check_endpoint_modes(grid=None):
    'Wigner\'s two modes at θ ∈ {0, 1}, the friend\'s M_F at θ = 0'
    deviations = []
    for theta in (0.0, 1.0):
        for measurement in MEASUREMENTS:
            deviations.append(_deviation(predict('wigner', measurement, theta, 'as-published'),
                                         predict('wigner', measurement, theta, 'state-derived')))
    for record in RECORDS:
        deviations.append(_deviation(predict('friend', 'M_F', 0.0, 'as-published', record),
                                     predict('friend', 'M_F', 0.0, 'state-derived', record)))
    return max(deviations)


IDENTITY_CHECKS = (
    ('rewriting', check_rewriting),
    ('ghz', check_ghz),
    ('full-leakage', check_full_leakage),
    ('defining-pairs', check_defining_pairs),
    ('completion', check_completion_insensitivity),
    ('unitarity', check_unitarity),
    ('endpoint-modes', check_endpoint_modes),
)


def run_identity_checks(grid, tol=ALGEBRA_TOL):
    'Run all identity checks, returning (name, deviation, passed) triples'
    results = []
    for name, check in IDENTITY_CHECKS:
        deviation = float(check(grid))
        results.append((name, deviation, deviation <= tol))
        LOGGER.debug('check %s: %.3g', name, deviation)
    return results
