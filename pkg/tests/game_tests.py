"""
Unit tests for game rounds, sessions and reports.
"""

import configparser
import json
import logging
import sys

import numpy as np
import pytest

from lxml import etree

from bubbleswitch.errors import ConfigError
from bubbleswitch.game import (GameConfig, Session, choose_measurement, decision_rates, inter_bubble_messages,
                               play_round, predictions_for, replay_session, round_rng, run_session,
                               run_sessions, sample_outcome)
from bubbleswitch.ledger import verify_ledger
from bubbleswitch.protocol import ProtocolConfig
from bubbleswitch.xml import build_xml_output, control_xml_output


logging.basicConfig(stream=sys.stdout, level=logging.DEBUG)


def make_config(theta=0.0, **kwargs):
    return GameConfig(protocol=ProtocolConfig(theta=theta), **kwargs)


def test_config():
    '''test game configuration checks'''
    config = make_config(0.3, seed=42)
    assert config.theta == 0.3 and config.measurement_policy == 'always_MW'
    assert config.to_dict()['seed'] == 42 and config.to_dict()['alpha'][1] == 0.0
    assert GameConfig().epsilon == 0.001 and GameConfig().max_rounds == 1000
    custom = configparser.ConfigParser()
    custom.read_string('[DEFAULT]\nEPSILON = 0.05\nMAX_ROUNDS = 20\n')
    assert GameConfig(config=custom)[1:] == GameConfig(epsilon=0.05, max_rounds=20)[1:]
    assert GameConfig(seed=2 ** 64 - 1).seed == 2 ** 64 - 1
    assert GameConfig(seed=np.uint64(3)).seed == 3
    for kwargs in ({'seed': -1}, {'seed': 2 ** 64}, {'seed': True}, {'seed': 1.5},
                   {'epsilon': 0.6}, {'epsilon': 0}, {'measurement_policy': 'sometimes'},
                   {'prediction_mode': 'guess'}, {'oracle_mode': 'referee'}, {'max_rounds': 0}):
        with pytest.raises(ConfigError):
            GameConfig(**kwargs)
    with pytest.raises(ConfigError):
        GameConfig(protocol=0.5)


def test_rng_and_choice():
    '''test per-round generators and the measurement choice'''
    assert round_rng(42, 1).random() == round_rng(42, 1).random()
    assert round_rng(42, 1).random() != round_rng(42, 2).random()
    assert round_rng(42, 1).random() != round_rng(43, 1).random()
    rng = np.random.default_rng(0)
    choices = [choose_measurement('random_uniform', rng) for _ in range(4000)]
    assert 0.45 < choices.count('M_W') / 4000 < 0.55
    assert choose_measurement('always_MF', rng) == 'M_F'
    assert choose_measurement('always_MW', rng) == 'M_W'
    # one draw is consumed whatever the policy
    first, second = round_rng(1, 1), round_rng(1, 1)
    choose_measurement('always_MF', first)
    choose_measurement('random_uniform', second)
    assert first.random() == second.random()


def test_sample_outcome():
    '''test the outcome oracles'''
    rng = np.random.default_rng(3)
    assert sample_outcome('M_F', 0.4, 'bubble-relative', 'phi1', rng) == 'phi1'
    assert sample_outcome('M_W', 0.0, 'bubble-relative', 'phi1', rng) == 'omega0'
    draws = [sample_outcome('M_F', 0.0, 'wigner-global', 'phi0', rng) for _ in range(4000)]
    assert 0.45 < draws.count('phi0') / 4000 < 0.55
    with pytest.raises(ConfigError):
        sample_outcome('M_F', 0.0, 'bubble-relative', None, rng)
    with pytest.raises(ConfigError):
        sample_outcome('M_W', 0.0, 'nowhere', 'phi0', rng)


def test_play_round():
    '''test a single round and the ledger entries it writes'''
    config = make_config(0.0, seed=7)
    session = Session(config)
    log = play_round(config, session)
    assert log.round_index == 1 and log.chosen_measurement == 'M_W'
    assert log.friend_record in ('phi0', 'phi1')
    assert log.outcome == 'omega0' and log.decision_after == 'continue'
    assert len(session.ledger) == 2
    predictions, outcome = session.ledger.records()
    assert predictions['kind'] == 'predictions' and outcome['kind'] == 'outcome'
    assert 'friend_record' not in json.dumps(session.ledger.records())
    public = log.public()
    assert 'friend_record' not in public and public['outcome'] == 'omega0'
    # decided session is over
    config = make_config(0.0, seed=7, measurement_policy='always_MW')
    session = Session(config)
    play_round(config, session, forced_outcome='1')
    assert session.decided and session.sprt.decision == 'accept_friend'
    with pytest.raises(ConfigError):
        play_round(config, session)


def test_messages():
    '''inter-bubble messages do not depend on the friend record'''
    config = make_config(0.6, seed=1)
    for measurement in ('M_W', 'M_F'):
        branches = []
        for record in ('phi0', 'phi1'):
            wigner, friend = predictions_for(config, measurement, record)
            branches.append(inter_bubble_messages(3, measurement, wigner, friend))
        assert branches[0] == branches[1]
        assert all(b'phi0' not in message or measurement == 'M_F' for message in branches[0])
    # M_W carries the friend's prediction, M_F Wigner's
    wigner, friend = predictions_for(config, 'M_W', 'phi0')
    assert b'"observer":"friend"' in inter_bubble_messages(1, 'M_W', wigner, friend)[1]
    wigner, friend = predictions_for(config, 'M_F', 'phi0')
    assert b'"observer":"wigner"' in inter_bubble_messages(1, 'M_F', wigner, friend)[1]


def test_sessions():
    '''test session outcomes at both ends of the parameter range'''
    report = run_session(make_config(0.0, epsilon=1e-3, seed=42))
    assert report.decision == 'accept_wigner' and report.rounds_used == 10
    assert report.summary() == 'accept_wigner at round 10'
    assert report.outcome_frequencies() == {'M_W': {'omega0': 1.0}}
    assert verify_ledger(report.ledger, root=report.root).passed
    assert len(report.ledger) == 20
    report = run_session(make_config(1.0, seed=42, max_rounds=100))
    assert report.decision == 'continue' and report.rounds_used == 100
    assert report.summary() == 'undecided after 100 rounds'
    assert abs(report.log_likelihood) < 1e-9
    report = run_session(make_config(0.25, epsilon=0.01, seed=5, measurement_policy='always_MF'))
    assert report.decision == 'accept_friend'
    assert all(log.outcome == log.friend_record for log in report.rounds)
    # state-derived predictions condition the repeat on the friend's record
    config = make_config(0.0, seed=1, measurement_policy='always_MF', prediction_mode='state-derived')
    assert config.conditional
    report = run_session(config)
    assert report.decision == 'accept_friend' and report.rounds_used == 10
    report = run_session(config._replace(conditional=False, max_rounds=50))
    assert report.decision == 'continue' and abs(report.log_likelihood) < 1e-9


def test_determinism_and_replay():
    '''identical configurations give identical reports'''
    config = make_config(0.3, epsilon=0.01, seed=2024, measurement_policy='random_uniform')
    first, second = run_session(config), run_session(config)
    assert first.to_json() == second.to_json() and first.root == second.root
    assert len({run_session(config._replace(seed=seed)).root for seed in range(2024, 2034)}) > 1
    outcomes = [log.outcome for log in first.rounds]
    replayed = replay_session(config, outcomes)
    assert replayed.root == first.root
    bits = ['0' if outcome in ('omega0', 'phi0') else '1' for outcome in outcomes]
    assert replay_session(config, bits).root == first.root
    forced = replay_session(make_config(0.0, seed=1), ['0'] * 12)
    assert forced.rounds_used == 10 and forced.decision == 'accept_wigner'
    short = replay_session(make_config(0.0, seed=1), ['0'] * 3)
    assert short.rounds_used == 3 and short.decision == 'continue'


def test_serialization():
    '''test JSON, CSV and XML reports'''
    report = run_session(make_config(0.0, epsilon=1e-3, seed=42))
    data = json.loads(report.to_json())
    assert data['decision'] == 'accept_wigner' and data['ledger_root'] == report.root
    assert data['rounds'][0]['friend_record'] in ('phi0', 'phi1')
    assert len(data['ledger']) == 20
    lines = report.to_csv().split('\n')
    assert lines[0] == 'round,measurement,friend_record,outcome,pW,pF,llr,decision'
    assert lines[1].startswith('1,M_W,') and lines[1].endswith(',continue')
    assert lines[10].endswith(',accept_wigner') and lines[11] == ''
    tree = build_xml_output(report)
    assert tree.tag == 'session' and tree.get('decision') == 'accept_wigner'
    assert len(tree.find('rounds')) == 10 and len(tree.find('ledger')) == 20
    parsed = etree.fromstring(control_xml_output(report))
    assert parsed.find('config').get('seed') == '42'
    assert parsed.find('rounds')[0].find('wigner')[0].get('outcome') == 'omega0'


def test_batches():
    '''test batches of sessions'''
    configs = [make_config(0.0, seed=seed) for seed in range(6)]
    reports = run_sessions(configs, parallel=3)
    assert [report.config.seed for report in reports] == list(range(6))
    assert [report.root for report in reports] == [run_session(config).root for config in configs]
    rates = decision_rates(reports)
    assert rates == {'accept_wigner': 1.0, 'accept_friend': 0.0, 'continue': 0.0}
    assert decision_rates([])['continue'] == 0.0


def test_package_exports():
    '''the package exposes the session and ledger entry points'''
    import bubbleswitch
    assert bubbleswitch.run_session is run_session and bubbleswitch.GameConfig is GameConfig
    assert bubbleswitch.verify_ledger is verify_ledger
    assert bubbleswitch.ProtocolConfig is ProtocolConfig
    report = bubbleswitch.run_session(bubbleswitch.GameConfig(seed=42))
    assert bubbleswitch.verify_ledger(report.ledger, root=report.root).passed


if __name__ == '__main__':
    test_config()
    test_rng_and_choice()
    test_sample_outcome()
    test_play_round()
    test_messages()
    test_sessions()
    test_determinism_and_replay()
    test_serialization()
    test_batches()
    test_package_exports()
