# pylint:disable-msg=E0611,I1101
"""
XML output of session reports.
"""

import logging

from lxml.etree import Element, SubElement, tostring

from . import __version__


LOGGER = logging.getLogger(__name__)


def _text(value):
    'Shortest round-trip rendering for floats, str() otherwise'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return str(value).lower()
    return str(value)


def add_prediction(parent, tag, prediction):
    'Attach a prediction with one child per outcome'
    elem = SubElement(parent, tag, observer=prediction.observer, mode=prediction.mode)
    for outcome, value in prediction.probabilities:
        SubElement(elem, 'p', outcome=outcome).text = _text(value)
    return elem


def build_xml_output(report):
    '''Build XML output tree based on a session report'''
    output = Element('session', decision=report.decision, rounds=str(report.rounds_used),
                     root=report.root, generator='bubbleswitch ' + __version__)
    config = SubElement(output, 'config')
    for key, value in sorted(report.config.to_dict().items()):
        if isinstance(value, list):
            value = ','.join(_text(item) for item in value)
        config.set(key, _text(value))
    rounds = SubElement(output, 'rounds')
    for log in report.rounds:
        elem = SubElement(rounds, 'round', index=str(log.round_index), measurement=log.chosen_measurement,
                          outcome=log.outcome, llr=_text(log.llr_after), decision=log.decision_after)
        add_prediction(elem, 'wigner', log.wigner_prediction)
        add_prediction(elem, 'friend', log.friend_prediction)
    ledger = SubElement(output, 'ledger')
    for entry in report.ledger:
        SubElement(ledger, 'entry', checksum=entry.checksum).text = entry.payload.decode('utf-8')
    return output


def control_xml_output(report):
    '''Serialize the XML tree of a report'''
    return tostring(build_xml_output(report), pretty_print=True, encoding='unicode')
