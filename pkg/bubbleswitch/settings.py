"""
Listing a series of settings that are applied module-wide.
"""


from configparser import ConfigParser
from os import cpu_count
from pathlib import Path


def use_config(filename=None, config=None):
    'Use configuration object or read and parse a settings file'
    # expert option: use config file directly
    if config is not None:
        return config
    # default filename
    if filename is None:
        filename = str(Path(__file__).parent / 'settings.cfg')
    # load
    config = ConfigParser()
    config.read(filename)
    return config

DEFAULT_CONFIG = use_config()


def config_floats(config, key):
    'Read a comma-separated list of floats from the DEFAULT section'
    return [float(item) for item in config.get('DEFAULT', key).split(',') if item.strip()]


# Numerical tolerances
ALGEBRA_TOL = 1e-12
PROBABILITY_TOL = 1e-10
# below this a branch counts as empty
ZERO_BRANCH = 1e-12

# Register size: S, F, W, A and F' at most
MAX_DIMENSION = 64

# Threads for parameter sweeps and session batches
SWEEP_THREADS = min(cpu_count() or 1, 16)  # 16 threads at most


# subsystem labels, in default layout order
SYSTEM = 'S'
FRIEND = 'F'
WIGNER = 'W'
ANCILLA = 'A'
FRIEND_REPEAT = "F'"

# basis index 0 and 1 of each subsystem, the ready state R is index 0
BASIS_LABELS = {
    SYSTEM: ('up', 'down'),
    FRIEND: ('phi0', 'phi1'),
    WIGNER: ('omega0', 'omega1'),
    ANCILLA: ('phi0', 'phi1'),
    FRIEND_REPEAT: ('phi0', 'phi1'),
}
READY = 0

# observers, measurements and modes
OBSERVERS = ('wigner', 'friend')
MEASUREMENTS = ('M_F', 'M_W')
PREDICTION_MODES = ('as-published', 'state-derived')
ORACLE_MODES = ('bubble-relative', 'wigner-global')
POLICIES = ('always_MF', 'always_MW', 'random_uniform')

# outcome labels per measurement, ordered as index 0, 1
OUTCOMES = {
    'M_F': ('phi0', 'phi1'),
    'M_W': ('omega0', 'omega1'),
}
RECORDS = OUTCOMES['M_F']

# decisions of the sequential test
ACCEPT_WIGNER = 'accept_wigner'
ACCEPT_FRIEND = 'accept_friend'
CONTINUE = 'continue'

CSV_HEADER = ('theta', 'epsilon', 'n0', 'pW_w0_pub', 'pF_w0_pub', 'pF_w0_derived', 'pW_f0_MF')
