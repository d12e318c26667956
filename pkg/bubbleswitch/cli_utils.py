"""
Functions dedicated to command-line processing.
"""

import csv
import io
import logging
import sys

from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigError
from .game import GameConfig, decision_rates, run_session, run_sessions
from .ledger import canonical_json
from .protocol import (ProtocolConfig, friend_state_after_interaction, friend_state_after_repeat,
                       initial_state, predict, run_identity_checks, swap_memory, theta_grid,
                       verify_closed_forms, wigner_state_after_interaction, wigner_state_after_measurement,
                       wigner_state_after_repeat)
from .settings import ALGEBRA_TOL, BASIS_LABELS, CSV_HEADER, RECORDS
from .sprt import DIVERGES, min_runs_to_accept_wigner, sprt_trace
from .xml import control_xml_output


LOGGER = logging.getLogger(__name__)

SweepRow = namedtuple('SweepRow', ['theta', 'epsilon', 'n0', 'pW_w0_pub', 'pF_w0_pub', 'pF_w0_derived', 'pW_f0_MF'])

TRACE_HEADER = ('step', 'outcome', 'llr', 'n0', 'n1', 'decision')


def _number(value):
    'Locale-independent shortest representation'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_result(result, args):
    '''Deal with result (write to STDOUT or to file)'''
    if result is None:
        return
    if not result.endswith('\n'):
        result += '\n'
    if args.output_file is None:
        sys.stdout.write(result)
    else:
        with open(args.output_file, mode='w', encoding='utf-8', newline='') as outputfile:
            outputfile.write(result)
        LOGGER.info('output written to %s', args.output_file)


def to_csv(header, rows):
    'CSV text with a fixed header and \\n line endings'
    output = io.StringIO()
    writer = csv.writer(output, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([_number(value) for value in row])
    return output.getvalue()


def protocol_from_args(args, theta=None):
    'ProtocolConfig from the common protocol flags'
    return ProtocolConfig(theta=args.theta if theta is None else theta,
                          alpha=args.alpha, beta=args.beta,
                          include_ancilla=getattr(args, 'swap', False),
                          force_swap=getattr(args, 'force_swap', False))


def game_config_from_args(args, seed=None):
    'GameConfig from the simulate flags'
    return GameConfig(protocol=protocol_from_args(args), epsilon=args.epsilon[0],
                      measurement_policy=args.policy, prediction_mode=args.mode,
                      oracle_mode=args.oracle, seed=args.seed if seed is None else seed,
                      max_rounds=args.max_rounds, conditional=args.conditional)


def parse_sequence(sequence):
    '''Split a comma-separated list of 0/1 outcome tokens; the empty string
       is the empty sequence'''
    tokens = [token.strip() for token in sequence.split(',')] if sequence.strip() else []
    for position, token in enumerate(tokens, start=1):
        if token not in ('0', '1'):
            raise ConfigError('malformed outcome token %r at position %s' % (token, position))
    return tokens


def report_output(report, output_format):
    'Serialized session report'
    if output_format == 'csv':
        return report.to_csv()
    if output_format == 'xml':
        return control_xml_output(report)
    return report.to_json()


def cmd_simulate(args):
    '''Run one session, or a seeded batch with --sessions, and print the decision'''
    config = game_config_from_args(args)
    if args.sessions < 1:
        raise ConfigError('number of sessions must be positive, got %s' % args.sessions)
    if args.sessions > 1:
        configs = [config._replace(seed=config.seed + offset) for offset in range(args.sessions)]
        reports = run_sessions(configs, args.parallel)
        rates = decision_rates(reports)
        sys.stdout.write(' '.join('%s=%s' % (decision, _number(rate)) for decision, rate in rates.items()) + '\n')
        if args.output_file is not None or args.out is not None:
            write_result(canonical_json([report.to_dict() for report in reports]), args)
        return 0
    if args.sequence is not None:
        report = run_session(config, parse_sequence(args.sequence))
    else:
        report = run_session(config)
    sys.stdout.write(report.summary() + '\n')
    sys.stdout.write('ledger root: ' + report.root + '\n')
    if args.output_file is not None or args.out is not None:
        write_result(report_output(report, args.out or 'json'), args)
    return 0


def sweep_thetas(start, stop, step):
    'Inclusive θ grid from start to stop'
    if not 0.0 <= start < stop <= 1.0:
        raise ConfigError('sweep range must satisfy 0 <= from < to <= 1, got %s, %s' % (start, stop))
    if step <= 0.0:
        raise ConfigError('sweep step must be positive, got %s' % step)
    count = int(round((stop - start) / step))
    thetas = [round(start + index * step, 10) for index in range(count + 1)]
    return [theta for theta in thetas if theta <= stop + 1e-12]


def sweep_row(theta, epsilon):
    'One SweepRow, with the friend\'s derived prediction taken for record φ0'
    return SweepRow(
        theta, epsilon, min_runs_to_accept_wigner(theta, epsilon),
        predict('wigner', 'M_W', theta).get('omega0'),
        predict('friend', 'M_W', theta, record=RECORDS[0]).get('omega0'),
        predict('friend', 'M_W', theta, 'state-derived', record=RECORDS[0]).get('omega0'),
        predict('wigner', 'M_F', theta).get('phi0'),
    )


def sweep_rows(thetas, epsilons, parallel=1):
    'Rows ordered by ε then θ, whatever the execution order'
    tasks = [(theta, epsilon) for epsilon in epsilons for theta in thetas]
    with ThreadPoolExecutor(max_workers=max(1, parallel)) as executor:
        return list(executor.map(lambda task: sweep_row(*task), tasks))


def cmd_sweep_theta(args):
    '''Minimum runs and predictions over a θ range, one row per θ and ε'''
    rows = sweep_rows(sweep_thetas(args.start, args.stop, args.step), args.epsilon, args.parallel)
    if any(row.n0 == DIVERGES for row in rows):
        LOGGER.info('predictions coincide at theta = 1, minimum runs diverge')
    if args.out == 'json':
        write_result(canonical_json([row._asdict() for row in rows]), args)
    else:
        write_result(to_csv(CSV_HEADER, rows), args)
    return 0


def cmd_sprt_trace(args):
    '''Sequential test on an explicit outcome sequence, one row per step'''
    tokens = parse_sequence(args.sequence)
    trace = sprt_trace(tokens, args.theta, args.epsilon[0])
    if len(trace) < len(tokens):
        LOGGER.info('decision reached after %s of %s outcomes', len(trace), len(tokens))
    rows = [(step, tokens[step - 1], state.log_likelihood, state.n0, state.n1, state.decision)
            for step, state in enumerate(trace, start=1)]
    if args.out == 'json':
        write_result(canonical_json([dict(zip(TRACE_HEADER, row)) for row in rows]), args)
    else:
        write_result(to_csv(TRACE_HEADER, rows), args)
    return 0


def cmd_verify(args):
    '''Closed forms against the Born rule on a grid, then the identity checks'''
    grid = theta_grid(args.grid)
    report = verify_closed_forms(grid, args.tol)
    status = 'PASS' if report.passed else 'FAIL'
    sys.stdout.write('closed-forms: %s points, max deviation %.3g, tol %.3g %s\n'
                     % (len(grid), report.max_deviation, args.tol, status))
    for entry in report.failures:
        sys.stdout.write('  theta=%s M_W %.3g M_F %.3g\n' % (_number(entry.theta), entry.deviation_mw, entry.deviation_mf))
    passed = report.passed
    for name, deviation, check_passed in run_identity_checks(grid, min(args.tol, ALGEBRA_TOL)):
        sys.stdout.write('%s: max deviation %.3g %s\n' % (name, deviation, 'PASS' if check_passed else 'FAIL'))
        passed = passed and check_passed
    return 0 if passed else 1


def format_amplitude(amplitude, precision=6):
    'Real numbers as signed decimals, complex ones in parentheses'
    if abs(amplitude.imag) <= ALGEBRA_TOL:
        return '%+.*f' % (precision, amplitude.real)
    return '(%+.*f%+.*fj)' % (precision, amplitude.real, precision, amplitude.imag)


def format_state(state, precision=6):
    'Nonzero amplitudes in basis-ket notation'
    terms = []
    for assignment, amplitude in state.nonzero_terms():
        ket = ','.join(BASIS_LABELS[label][index] for label, index in assignment.items())
        terms.append('%s|%s>' % (format_amplitude(amplitude, precision), ket))
    return ' '.join(terms) or '0'


def named_states(config):
    'Protocol states in order of appearance, with display names'
    theta = config.theta
    states = [('Psi0', initial_state(config)),
              ('Psi1^W', wigner_state_after_measurement(config).state),
              ('Psi2^W', wigner_state_after_interaction(theta, config).state)]
    for record in RECORDS:
        states.append(('Psi2^F[%s]' % record, friend_state_after_interaction(theta, record, config).state))
    if config.include_ancilla:
        states.append(('Psi3^W', swap_memory(wigner_state_after_interaction(theta, config)).state))
    states.append(('Psi4^W', wigner_state_after_repeat(theta, config).state))
    for record in RECORDS:
        states.append(('Psi4^F[%s]' % record, friend_state_after_repeat(theta, record, config).state))
    return states


def cmd_states(args):
    '''Print every named protocol state for one θ'''
    config = protocol_from_args(args)
    lines = ['%s (%s): %s' % (name, ','.join(state.layout.labels), format_state(state, args.precision))
             for name, state in named_states(config)]
    write_result('\n'.join(lines), args)
    return 0
