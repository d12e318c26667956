"""
Dense state vectors over registers of labeled two-level subsystems:
construction, operator application, Born probabilities, projective collapse
and completion of isometries to unitaries.
"""

import logging

from collections import namedtuple

import numpy as np

from .errors import BasisError, ConfigError, LayoutError, NormalizationError, OrthonormalityError
from .settings import ALGEBRA_TOL, MAX_DIMENSION, PROBABILITY_TOL, ZERO_BRANCH


LOGGER = logging.getLogger(__name__)

# residual below which a completion candidate is considered dependent
GRAM_SCHMIDT_CUTOFF = 1e-8


def _frozen(array):
    'Return a read-only complex copy of an array'
    result = np.array(array, dtype=complex)
    result.flags.writeable = False
    return result


class SubsystemLayout:
    "Ordered labeled subsystems spanning a tensor product space."
    __slots__ = ['labels', 'dims', 'total']

    def __init__(self, entries):
        labels, dims = [], []
        for entry in entries:
            if isinstance(entry, str):
                label, dim = entry, 2
            else:
                label, dim = entry
            labels.append(label)
            dims.append(int(dim))
        if len(set(labels)) != len(labels):
            raise LayoutError('duplicate subsystem labels: %s' % labels)
        if any(dim != 2 for dim in dims):
            raise LayoutError('only two-level subsystems are supported: %s' % dims)
        self.labels = tuple(labels)
        self.dims = tuple(dims)
        self.total = int(np.prod(self.dims)) if self.dims else 1
        if self.total > MAX_DIMENSION:
            raise LayoutError('register dimension %s exceeds %s' % (self.total, MAX_DIMENSION))

    def __len__(self):
        return len(self.labels)

    def __contains__(self, label):
        return label in self.labels

    def __eq__(self, other):
        return isinstance(other, SubsystemLayout) and self.labels == other.labels and self.dims == other.dims

    def __hash__(self):
        return hash((self.labels, self.dims))

    def __repr__(self):
        return 'SubsystemLayout(%s)' % ','.join(self.labels)

    def position(self, label):
        'Return the tensor axis of a subsystem'
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError('unknown subsystem label: %s' % label) from None

    def extend(self, other):
        'Layout of the tensor product self ⊗ other'
        return SubsystemLayout(list(zip(self.labels, self.dims)) + list(zip(other.labels, other.dims)))

    def index_of(self, assignment):
        'Flat basis index of a full label → basis index assignment'
        missing = [label for label in self.labels if label not in assignment]
        if missing:
            raise LayoutError('missing labels in assignment: %s' % missing)
        unknown = [label for label in assignment if label not in self.labels]
        if unknown:
            raise LayoutError('unknown labels in assignment: %s' % unknown)
        index = 0
        for label, dim in zip(self.labels, self.dims):
            value = int(assignment[label])
            if not 0 <= value < dim:
                raise LayoutError('basis index %s out of range for %s' % (value, label))
            index = index * dim + value
        return index

    def assignment_of(self, index):
        'Inverse of index_of'
        return {label: int(value) for label, value in zip(self.labels, np.unravel_index(index, self.dims))}


class StateVector:
    "Immutable amplitude vector over a layout, lexicographic basis order."
    __slots__ = ['layout', 'amplitudes']

    def __init__(self, layout, amplitudes, normalize=False):
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape[0] != layout.total:
            raise LayoutError('expected %s amplitudes, got %s' % (layout.total, amplitudes.shape[0]))
        if normalize:
            norm = np.linalg.norm(amplitudes)
            if norm <= ZERO_BRANCH:
                raise NormalizationError('cannot normalize a zero vector')
            amplitudes = amplitudes / norm
        self.layout = layout
        self.amplitudes = _frozen(amplitudes)

    def __repr__(self):
        return 'StateVector(%s, norm=%.12g)' % (','.join(self.layout.labels), self.norm())

    def norm(self):
        'Euclidean norm'
        return float(np.linalg.norm(self.amplitudes))

    @property
    def normalized(self):
        'True if the norm is one within algebraic tolerance'
        return abs(self.norm() - 1.0) <= ALGEBRA_TOL

    def amplitude(self, assignment):
        'Amplitude of the product basis state given as label → index'
        return complex(self.amplitudes[self.layout.index_of(assignment)])

    def nonzero_terms(self, tol=ALGEBRA_TOL):
        'Yield (assignment, amplitude) for all amplitudes above tolerance'
        for index in np.flatnonzero(np.abs(self.amplitudes) > tol):
            yield self.layout.assignment_of(index), complex(self.amplitudes[index])

    def allclose(self, other, tol=ALGEBRA_TOL):
        'Entrywise comparison on the same layout'
        _check_layouts(self, other)
        return bool(np.max(np.abs(self.amplitudes - other.amplitudes), initial=0.0) <= tol)


class Operator:
    "Dense square matrix acting on a subset of subsystems."
    __slots__ = ['targets', 'matrix', 'kind', 'name']

    def __init__(self, targets, matrix, kind=None, name=''):
        matrix = np.asarray(matrix, dtype=complex)
        targets = tuple(targets)
        size = 2 ** len(targets)
        if matrix.shape != (size, size):
            raise LayoutError('operator on %s needs a %sx%s matrix' % (targets, size, size))
        if len(set(targets)) != len(targets):
            raise LayoutError('duplicate operator targets: %s' % (targets,))
        if kind == 'unitary' and not is_unitary(matrix):
            raise OrthonormalityError('matrix %s is not unitary' % name)
        if kind == 'projector' and not is_projector(matrix):
            raise BasisError('matrix %s is not an orthogonal projector' % name)
        self.targets = targets
        self.matrix = _frozen(matrix)
        self.kind = kind
        self.name = name

    def __repr__(self):
        return 'Operator(%s on %s)' % (self.name or self.kind, ','.join(self.targets))

    @property
    def unitary(self):
        return self.kind == 'unitary'

    @property
    def projector(self):
        return self.kind == 'projector'


class MeasurementBasis:
    "Complete family of orthogonal projectors with named outcomes."
    __slots__ = ['name', 'family']

    def __init__(self, name, family):
        family = tuple(family)
        if not family:
            raise BasisError('empty measurement basis')
        targets = family[0][1].targets
        for outcome, proj in family:
            if not proj.projector:
                raise BasisError('outcome %s is not a projector' % outcome)
            if proj.targets != targets:
                raise BasisError('projectors act on different subsystems')
        for i, (_, first) in enumerate(family):
            for _, second in family[i + 1:]:
                if np.max(np.abs(first.matrix @ second.matrix)) > ALGEBRA_TOL:
                    raise BasisError('projectors of %s are not orthogonal' % name)
        total = sum(proj.matrix for _, proj in family)
        if np.max(np.abs(total - np.eye(total.shape[0]))) > ALGEBRA_TOL:
            raise BasisError('projectors of %s do not sum to the identity' % name)
        self.name = name
        self.family = family

    @property
    def outcomes(self):
        return tuple(outcome for outcome, _ in self.family)

    @property
    def targets(self):
        return self.family[0][1].targets


class Prediction(namedtuple('Prediction', ['probabilities', 'observer', 'measurement', 'theta', 'mode'])):
    '''Normalized distribution over named outcomes, stamped with its origin.
       probabilities is a tuple of (outcome, probability) pairs in outcome order.'''
    __slots__ = ()

    def __new__(cls, probabilities, observer=None, measurement=None, theta=None, mode=None):
        pairs = tuple((outcome, float(value)) for outcome, value in dict(probabilities).items())
        return super().__new__(cls, pairs, observer, measurement, theta, mode)

    @property
    def outcomes(self):
        return tuple(outcome for outcome, _ in self.probabilities)

    def get(self, outcome):
        'Probability of an outcome, 0 for unknown outcomes'
        return dict(self.probabilities).get(outcome, 0.0)

    def as_dict(self):
        return dict(self.probabilities)

    def stamped(self, **fields):
        'Copy with observer, measurement, theta or mode set'
        return self._replace(**fields)


def is_unitary(matrix, tol=ALGEBRA_TOL):
    'Check M†M = identity entrywise'
    matrix = np.asarray(matrix)
    return bool(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))) <= tol)


def is_projector(matrix, tol=ALGEBRA_TOL):
    'Check M² = M and M† = M entrywise'
    matrix = np.asarray(matrix)
    return bool(np.max(np.abs(matrix @ matrix - matrix)) <= tol
                and np.max(np.abs(matrix.conj().T - matrix)) <= tol)


def _check_layouts(first, second):
    if first.layout != second.layout:
        raise LayoutError('layout mismatch: %r vs %r' % (first.layout, second.layout))


def _apply_array(op, layout, vector):
    'Contract the operator with its target axes, identity elsewhere'
    axes = [layout.position(label) for label in op.targets]
    k = len(axes)
    tensor = np.asarray(vector).reshape(layout.dims)
    matrix = op.matrix.reshape(tuple(layout.dims[a] for a in axes) * 2)
    result = np.tensordot(matrix, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(result, list(range(k)), axes).reshape(-1)


def basis_state(layout, assignment):
    'Product basis state from a complete label → basis index assignment'
    amplitudes = np.zeros(layout.total, dtype=complex)
    amplitudes[layout.index_of(assignment)] = 1.0
    return StateVector(layout, amplitudes)


def product_state(layout, factors):
    'Tensor product of single-subsystem vectors, given as label → 2-vector'
    missing = [label for label in layout.labels if label not in factors]
    if missing:
        raise LayoutError('missing factors for %s' % missing)
    amplitudes = np.ones(1, dtype=complex)
    for label in layout.labels:
        amplitudes = np.kron(amplitudes, np.asarray(factors[label], dtype=complex))
    return StateVector(layout, amplitudes)


def tensor(first, second):
    'State first ⊗ second on the concatenated layout'
    return StateVector(first.layout.extend(second.layout), np.kron(first.amplitudes, second.amplitudes))


def superpose(terms, normalize=False):
    'Linear combination of (coefficient, state) pairs sharing one layout'
    terms = list(terms)
    if not terms:
        raise LayoutError('nothing to superpose')
    layout = terms[0][1].layout
    amplitudes = np.zeros(layout.total, dtype=complex)
    for coefficient, state in terms:
        if state.layout != layout:
            raise LayoutError('layout mismatch in superposition')
        amplitudes = amplitudes + coefficient * state.amplitudes
    return StateVector(layout, amplitudes, normalize=normalize)


def apply(op, state):
    'Apply op ⊗ identity to a state'
    return StateVector(state.layout, _apply_array(op, state.layout, state.amplitudes))


def embed(op, layout):
    'Full-space matrix of op ⊗ identity in layout order'
    columns = [_apply_array(op, layout, column) for column in np.eye(layout.total, dtype=complex)]
    return np.column_stack(columns)


def inner_product(first, second):
    '⟨first|second⟩, conjugate-linear in the first argument'
    _check_layouts(first, second)
    return complex(np.vdot(first.amplitudes, second.amplitudes))


def _expectation(state, projector):
    value = inner_product(state, apply(projector, state)).real
    return min(max(value, 0.0), 1.0)


def born_probabilities(state, basis):
    'Outcome probabilities ⟨ψ|Π_k|ψ⟩ of a measurement basis'
    if abs(state.norm() - 1.0) > PROBABILITY_TOL:
        raise NormalizationError('Born probabilities need a normalized state (norm %s)' % state.norm())
    probabilities = {outcome: _expectation(state, proj) for outcome, proj in basis.family}
    total = sum(probabilities.values())
    if abs(total - 1.0) > PROBABILITY_TOL:
        raise BasisError('probabilities of %s sum to %s' % (basis.name, total))
    return Prediction(probabilities, measurement=basis.name)


def project(state, projector, renormalize=True):
    'Return (probability, Π|ψ⟩), renormalized on request'
    if not projector.projector:
        raise BasisError('%r is not flagged as a projector' % projector)
    branch = apply(projector, state)
    probability = min(max(branch.norm() ** 2, 0.0), 1.0)
    if not renormalize:
        return probability, branch
    if probability <= ZERO_BRANCH:
        raise NormalizationError('cannot renormalize the empty %s branch' % projector.name)
    return probability, StateVector(state.layout, branch.amplitudes, normalize=True)


def _orthonormal_columns(vectors, kind):
    'Stack vectors as columns and check they are orthonormal'
    matrix = np.column_stack([vector.amplitudes for vector in vectors])
    gram = matrix.conj().T @ matrix
    deviation = np.max(np.abs(gram - np.eye(gram.shape[0])))
    if deviation > PROBABILITY_TOL:
        raise OrthonormalityError('%s are not orthonormal (deviation %.3g)' % (kind, deviation))
    return matrix


def _complement(matrix, order):
    '''Orthonormal basis of the complement of the column span, obtained by
       Gram-Schmidt over the computational basis in the given order'''
    size, rank = matrix.shape
    basis = [matrix[:, i] for i in range(rank)]
    found = []
    candidates = range(size) if order == 'canonical' else range(size - 1, -1, -1)
    for index in candidates:
        if len(found) == size - rank:
            break
        vector = np.zeros(size, dtype=complex)
        vector[index] = 1.0
        # two passes keep the residual orthogonal to machine precision
        for _ in range(2):
            for column in basis + found:
                vector = vector - np.vdot(column, vector) * column
        norm = np.linalg.norm(vector)
        if norm > GRAM_SCHMIDT_CUTOFF:
            found.append(vector / norm)
    if len(found) != size - rank:
        raise OrthonormalityError('could not complete a basis of dimension %s' % size)
    return np.column_stack(found) if found else np.zeros((size, 0), dtype=complex)


def complete_to_unitary(pairs, order='canonical', name=''):
    '''Unitary mapping each input state to its output state. Off the input span
       the complement of the inputs is sent to the complement of the outputs,
       both completed from the computational basis in ascending (canonical)
       or descending (reversed) index order.'''
    if order not in ('canonical', 'reversed'):
        raise ConfigError('unknown completion order: %s' % order)
    pairs = list(pairs)
    if not pairs:
        raise OrthonormalityError('no defining pairs')
    layout = pairs[0][0].layout
    for source, target in pairs:
        if source.layout != layout or target.layout != layout:
            raise LayoutError('defining pairs must share one layout')
    inputs = _orthonormal_columns([source for source, _ in pairs], 'inputs')
    outputs = _orthonormal_columns([target for _, target in pairs], 'outputs')
    full_in = np.hstack([inputs, _complement(inputs, order)])
    full_out = np.hstack([outputs, _complement(outputs, order)])
    LOGGER.debug('completed %s from %s pairs (%s order)', name or 'isometry', len(pairs), order)
    return Operator(layout.labels, full_out @ full_in.conj().T, kind='unitary', name=name)


def sample_outcome(prediction, rng):
    'Draw one outcome with a single uniform variate against the cumulative distribution'
    draw = rng.random()
    cumulative = 0.0
    for outcome, probability in prediction.probabilities:
        if probability <= 0.0:
            continue
        cumulative += probability
        if draw < cumulative:
            return outcome
    # rounding slack: last outcome with positive probability
    for outcome, probability in reversed(prediction.probabilities):
        if probability > 0.0:
            return outcome
    raise NormalizationError('cannot sample from an empty distribution')
