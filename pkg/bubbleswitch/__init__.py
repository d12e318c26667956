# -*- coding: utf-8 -*-
"""
Simulate the Wigner's friend bubble switching game and test which observer's
state assignment the outcomes validate.
"""

# meta
__title__ = 'bubbleswitch'
__author__ = 'bubbleswitch contributors'
__license__ = 'GNU GPL v3+'
__version__ = '0.1.0'


import logging

from .game import GameConfig, run_session
from .ledger import verify_ledger
from .protocol import ProtocolConfig, predict, verify_closed_forms
from .sprt import min_runs_to_accept_wigner, sprt_init, sprt_update

logging.getLogger(__name__).addHandler(logging.NullHandler())
