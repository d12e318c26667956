"""
End-to-end checks: run counts, closed forms, state identities, session
statistics, message content and reproducibility.
"""

import logging
import sys

from math import cos, pi, sqrt

import numpy as np

from bubbleswitch.game import (GameConfig, choose_measurement, decision_rates, inter_bubble_messages,
                               predictions_for, round_rng, run_session, run_sessions, sample_outcome)
from bubbleswitch.ledger import Ledger, LedgerEntry, verify_ledger
from bubbleswitch.protocol import (ProtocolConfig, check_completion_insensitivity, run_identity_checks,
                                   theta_grid, verify_closed_forms)
from bubbleswitch.sprt import DIVERGES, first_crossing, min_runs_to_accept_wigner, sprt_trace


logging.basicConfig(stream=sys.stdout, level=logging.INFO)

GRID = theta_grid(101)


def test_threshold_runs():
    '''all-ω0 crosses at run 10, a late ω1 decides for the friend at run 5'''
    trace = sprt_trace(['0'] * 20, 0.0, 1e-3)
    assert len(trace) == 10 and trace[-1].decision == 'accept_wigner'
    trace = sprt_trace(['0', '0', '0', '0', '1'], 0.0, 1e-3)
    assert len(trace) == 5 and trace[-1].decision == 'accept_friend'


def test_minimum_runs_curve():
    '''closed-form minimum runs match simulated crossings'''
    for epsilon in (1e-2, 1e-3):
        values = []
        for step in range(10):
            theta = step / 10
            runs = min_runs_to_accept_wigner(theta, epsilon)
            assert runs == first_crossing(theta, epsilon)
            values.append(runs)
        assert values == sorted(values)
        assert min_runs_to_accept_wigner(1.0, epsilon) == DIVERGES


def test_closed_forms():
    '''closed forms agree with the Born rule on a 101-point grid'''
    report = verify_closed_forms(GRID, tol=1e-10)
    assert report.passed and len(report.entries) == 101


def test_state_identities():
    '''rewriting, GHZ, full leakage, defining pairs and endpoint agreement'''
    results = run_identity_checks(GRID, tol=1e-12)
    assert all(passed for _, _, passed in results), results


def test_completion_insensitivity():
    '''two completions of the interaction give the same states'''
    assert check_completion_insensitivity(GRID) < 1e-12


def test_decision_rates():
    '''the observer whose measurement is performed wins the test'''
    for theta in (0.0, 0.25, 0.5):
        configs = [GameConfig(protocol=ProtocolConfig(theta=theta), epsilon=0.01, seed=seed)
                   for seed in range(1000)]
        rates = decision_rates(run_sessions(configs))
        assert rates['accept_wigner'] >= 0.98, (theta, rates)
    configs = [GameConfig(protocol=ProtocolConfig(theta=0.25), epsilon=0.01, measurement_policy='always_MF',
                          seed=seed) for seed in range(1000)]
    rates = decision_rates(run_sessions(configs))
    assert rates['accept_friend'] >= 0.98, rates


def test_frequency_convergence():
    '''sampled frequencies stay within three standard deviations'''
    draws = 100000
    rng = np.random.default_rng(20)
    expected = (1 + cos(pi / 4)) / 2
    count = sum(sample_outcome('M_W', 0.5, 'bubble-relative', 'phi0', rng) == 'omega0' for _ in range(draws))
    assert abs(count / draws - expected) <= 3 * sqrt(expected * (1 - expected) / draws)
    count = sum(sample_outcome('M_F', 0.0, 'wigner-global', 'phi0', rng) == 'phi0' for _ in range(draws))
    assert abs(count / draws - 0.5) <= 3 * sqrt(0.25 / draws)


def test_information_flow():
    '''inter-bubble messages are identical in both record branches'''
    rng = np.random.default_rng(11)
    for _ in range(100):
        theta, seed = float(rng.random()), int(rng.integers(0, 2 ** 63))
        config = GameConfig(protocol=ProtocolConfig(theta=theta), measurement_policy='random_uniform', seed=seed)
        measurement = choose_measurement(config.measurement_policy, round_rng(seed, 1))
        streams = []
        for record in ('phi0', 'phi1'):
            wigner, friend = predictions_for(config, measurement, record)
            streams.append(b''.join(inter_bubble_messages(1, measurement, wigner, friend)))
        assert streams[0] == streams[1]
        # Wigner's state-derived prediction carries no record either
        derived = config._replace(prediction_mode='state-derived')
        streams = [b''.join(inter_bubble_messages(1, 'M_F', *predictions_for(derived, 'M_F', record)))
                   for record in ('phi0', 'phi1')]
        assert streams[0] == streams[1]


def test_reproducibility_and_tampering():
    '''identical configurations reproduce reports; every byte flip is detected'''
    config = GameConfig(protocol=ProtocolConfig(theta=0.4), epsilon=0.01, measurement_policy='random_uniform',
                        seed=77)
    first, second = run_session(config), run_session(config)
    assert first.to_json() == second.to_json()
    assert first.root == second.root
    ledger = first.ledger
    assert verify_ledger(ledger, root=first.root).passed
    for index, entry in enumerate(ledger.entries):
        for position in range(len(entry.payload)):
            payload = bytearray(entry.payload)
            payload[position] ^= 0x20
            entries = list(ledger.entries)
            entries[index] = LedgerEntry(bytes(payload), entry.checksum)
            result = verify_ledger(Ledger(entries), root=first.root)
            assert not result.passed and result.first_bad_index == index


if __name__ == '__main__':
    test_threshold_runs()
    test_minimum_runs_curve()
    test_closed_forms()
    test_state_identities()
    test_completion_insensitivity()
    test_decision_rates()
    test_frequency_convergence()
    test_information_flow()
    test_reproducibility_and_tampering()
