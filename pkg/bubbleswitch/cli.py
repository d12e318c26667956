"""
Implementing a basic command-line interface.
"""

import argparse
import configparser
import logging
import sys

from math import sqrt
from platform import python_version

from . import __version__
from .cli_utils import cmd_simulate, cmd_sprt_trace, cmd_states, cmd_sweep_theta, cmd_verify
from .errors import BubbleSwitchError, ConfigError
from .settings import SWEEP_THREADS, config_floats, use_config


LOGGER = logging.getLogger(__name__)

POLICY_NAMES = {'always-mf': 'always_MF', 'always-mw': 'always_MW', 'random': 'random_uniform'}


def _common_options():
    'Options shared by all subcommands'
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group('Output', 'Determines if and how results will be written')
    group.add_argument("-o", "--output-file",
                       help="write results to a file instead of standard output",
                       type=str)
    group.add_argument('--parallel',
                       help="specify a number of threads for sweeps and session batches",
                       type=int, default=SWEEP_THREADS)
    group.add_argument("--config-file",
                       help="override standard parameters with a custom config file",
                       type=str)
    group.add_argument('-v', '--verbose', action='count', default=0,
                       help="increase logging verbosity (-v or -vv)",
                       )
    return common


def _seed_option():
    'Seed accepted by every command, deterministic ones ignore it'
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed",
                        help="unsigned 64-bit seed, unused by deterministic commands",
                        type=int)
    return seeded


def _protocol_options():
    'Parameters of the prepared state and the optional registers'
    protocol = argparse.ArgumentParser(add_help=False)
    group = protocol.add_argument_group('Protocol', 'Encoding parameter and initial amplitudes')
    group.add_argument("--theta",
                       help="encoding parameter in [0, 1], 0 leaks no outcome information",
                       type=float)
    group.add_argument("--alpha",
                       help="amplitude of the spin-up component (real)",
                       type=float)
    group.add_argument("--beta",
                       help="amplitude of the spin-down component (real)",
                       type=float)
    group.add_argument("--swap",
                       help="transfer the friend's record to an ancilla before Wigner measures",
                       action="store_true")
    group.add_argument("--force-swap",
                       help="apply the memory swap before the repeated measurement as well",
                       action="store_true")
    return protocol


def parse_args(args):
    """Define parser for command-line arguments"""
    parser = argparse.ArgumentParser(description='Command-line interface for bubbleswitch')
    parser.add_argument("--version",
                        help="show version information and exit",
                        action="version",
                        version="bubbleswitch {} - Python {}".format(
                        __version__, python_version()
                        ),)
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True
    common, protocol, seeded = _common_options(), _protocol_options(), _seed_option()

    simulate = subparsers.add_parser('simulate', parents=[common, protocol],
                                     help="play a seeded session of the switching game")
    simulate.set_defaults(func=cmd_simulate)
    game = simulate.add_argument_group('Game', 'Measurement choice, predictions and referee')
    game.add_argument("--epsilon",
                      help="error bound of the sequential test",
                      type=float, action="append")
    game.add_argument("--policy",
                      help="measurement chosen in each round",
                      choices=sorted(POLICY_NAMES), default='always-mw')
    game.add_argument("--mode",
                      help="closed-form or Born-rule predictions",
                      choices=['as-published', 'state-derived'], default='as-published')
    game.add_argument("--oracle",
                      help="outcome sampling rule",
                      choices=['bubble-relative', 'wigner-global'], default='bubble-relative')
    game.add_argument("--unconditioned", dest="conditional",
                      help="evaluate the friend's state-derived M_F prediction without conditioning on their record",
                      action="store_false")
    game.add_argument("--seed",
                      help="unsigned 64-bit seed of the session",
                      type=int, required=True)
    game.add_argument("--max-rounds",
                      help="stop undecided after this many rounds",
                      type=int)
    game.add_argument("--sessions",
                      help="play a batch of sessions with consecutive seeds and report decision rates",
                      type=int, default=1)
    game.add_argument("--sequence",
                      help="replay a comma-separated outcome sequence (0/1) instead of sampling",
                      type=str)
    simulate.add_argument('--out',
                          help="report format",
                          choices=['csv', 'json', 'xml'])

    sweep = subparsers.add_parser('sweep-theta', parents=[common, seeded],
                                  help="minimum number of runs over a range of theta")
    sweep.set_defaults(func=cmd_sweep_theta)
    sweep.add_argument("--from", dest='start', help="first theta", type=float)
    sweep.add_argument("--to", dest='stop', help="last theta", type=float)
    sweep.add_argument("--step", help="theta increment", type=float)
    sweep.add_argument("--epsilon",
                       help="error bound, repeat for several",
                       type=float, action="append")
    sweep.add_argument('--out', help="output format", choices=['csv', 'json'], default='csv')

    trace = subparsers.add_parser('sprt-trace', parents=[common, seeded],
                                  help="sequential test on an explicit outcome sequence")
    trace.set_defaults(func=cmd_sprt_trace)
    trace.add_argument("--theta", help="encoding parameter", type=float)
    trace.add_argument("--epsilon", help="error bound", type=float, action="append")
    trace.add_argument("--sequence",
                       help="comma-separated outcomes, 0 for omega0 and 1 for omega1",
                       type=str, required=True)
    trace.add_argument('--out', help="output format", choices=['csv', 'json'], default='csv')

    verify = subparsers.add_parser('verify', parents=[common, seeded],
                                   help="check closed forms and state identities on a grid")
    verify.set_defaults(func=cmd_verify)
    verify.add_argument("--grid", help="number of theta points on [0, 1]", type=int)
    verify.add_argument("--tol", help="tolerance of the closed-form comparison", type=float)

    states = subparsers.add_parser('states', parents=[common, protocol, seeded],
                                   help="print the protocol states for one theta")
    states.set_defaults(func=cmd_states)
    states.add_argument("--precision", help="decimals per amplitude", type=int, default=6)

    # wrap in mapping to prevent invalid input
    return map_args(parser.parse_args(args))


def _amplitudes(alpha, beta):
    'Fill in the missing amplitude so that |α|² + |β|² = 1'
    if alpha is None and beta is None:
        return 1 / sqrt(2), 1 / sqrt(2)
    if beta is None:
        return alpha, sqrt(max(0.0, 1 - alpha ** 2))
    if alpha is None:
        return sqrt(max(0.0, 1 - beta ** 2)), beta
    return alpha, beta


def map_args(args):
    '''Map command-line choices to library names and fill defaults from the config file.'''
    # user settings are read over the packaged defaults
    config = use_config()
    if args.config_file is not None:
        try:
            found = config.read(args.config_file, encoding='utf-8')
        except configparser.Error as err:
            raise ConfigError('malformed config file: %s' % err) from err
        if not found:
            raise ConfigError('cannot read config file %s' % args.config_file)
    try:
        if hasattr(args, 'theta') and args.theta is None:
            args.theta = config.getfloat('DEFAULT', 'THETA')
        if hasattr(args, 'epsilon') and not args.epsilon:
            if args.command == 'sweep-theta':
                args.epsilon = config_floats(config, 'SWEEP_EPSILONS')
            else:
                args.epsilon = [config.getfloat('DEFAULT', 'EPSILON')]
        if hasattr(args, 'max_rounds') and args.max_rounds is None:
            args.max_rounds = config.getint('DEFAULT', 'MAX_ROUNDS')
        if args.command == 'sweep-theta':
            for attribute, key in (('start', 'SWEEP_START'), ('stop', 'SWEEP_STOP'), ('step', 'SWEEP_STEP')):
                if getattr(args, attribute) is None:
                    setattr(args, attribute, config.getfloat('DEFAULT', key))
        if args.command == 'verify':
            if args.grid is None:
                args.grid = config.getint('DEFAULT', 'GRID_POINTS')
            if args.tol is None:
                args.tol = config.getfloat('DEFAULT', 'TOLERANCE')
    except (ValueError, configparser.Error) as err:
        raise ConfigError('invalid value in config file: %s' % err) from err
    if hasattr(args, 'alpha'):
        args.alpha, args.beta = _amplitudes(args.alpha, args.beta)
    if hasattr(args, 'policy'):
        args.policy = POLICY_NAMES[args.policy]
    return args


def main():
    """ Run as a command-line utility. """
    try:
        args = parse_args(sys.argv[1:])
    except BubbleSwitchError as err:
        sys.stderr.write('ERROR: %s\n' % err)
        sys.exit(2)
    sys.exit(process_args(args))


def process_args(args):
    """Perform the actual processing according to the arguments, return the exit code"""
    # verbosity
    if args.verbose == 1:
        logging.basicConfig(stream=sys.stdout, level=logging.WARNING)
    elif args.verbose >= 2:
        logging.basicConfig(stream=sys.stdout, level=logging.DEBUG)
    try:
        return args.func(args)
    except BubbleSwitchError as err:
        sys.stderr.write('ERROR: %s\n' % err)
        return 2


if __name__ == '__main__':
    main()
