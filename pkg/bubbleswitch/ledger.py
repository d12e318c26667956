"""
Append-only prediction ledger chained by checksums, and the canonical
serialization its payloads use.
"""

import json
import logging

from collections import namedtuple
from hashlib import sha256
from math import isinf, isnan

from .errors import LedgerError


LOGGER = logging.getLogger(__name__)

GENESIS = '0' * 64

LedgerEntry = namedtuple('LedgerEntry', ['payload', 'checksum'])
LedgerVerification = namedtuple('LedgerVerification', ['passed', 'first_bad_index'])


def _plain(value):
    'Replace non-finite floats by strings and tuples by lists'
    if isinstance(value, float):
        if isnan(value):
            return 'nan'
        if isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


def canonical_json(record):
    'Field-ordered compact JSON, shortest round-trip floats, as a string'
    return json.dumps(_plain(record), sort_keys=True, separators=(',', ':'), ensure_ascii=False, allow_nan=False)


def canonical_bytes(record):
    'UTF-8 encoded canonical JSON'
    return canonical_json(record).encode('utf-8')


def chain_checksum(previous, payload):
    'Checksum of a payload chained to the previous checksum'
    digest = sha256()
    digest.update(previous.encode('ascii'))
    digest.update(payload)
    return digest.hexdigest()


class Ledger:
    "Append-only list of payloads, each committed to everything before it."
    __slots__ = ['entries']

    def __init__(self, entries=None):
        self.entries = list(entries or [])

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def root(self):
        'Checksum of the last entry, GENESIS for an empty ledger'
        return self.entries[-1].checksum if self.entries else GENESIS

    def append(self, record):
        'Serialize and chain a record (dict or bytes), return its checksum'
        payload = record if isinstance(record, bytes) else canonical_bytes(record)
        checksum = chain_checksum(self.root, payload)
        self.entries.append(LedgerEntry(payload, checksum))
        return checksum

    def records(self):
        'Decoded payloads in order'
        return [json.loads(entry.payload.decode('utf-8')) for entry in self.entries]

    def to_list(self):
        'JSON-compatible form'
        return [{'payload': entry.payload.decode('utf-8'), 'checksum': entry.checksum} for entry in self.entries]

    @classmethod
    def from_list(cls, items):
        'Inverse of to_list, without verification'
        try:
            return cls([LedgerEntry(item['payload'].encode('utf-8'), item['checksum']) for item in items])
        except (KeyError, TypeError, AttributeError) as err:
            raise LedgerError('malformed ledger: %s' % err) from err


def verify_ledger(ledger, root=None):
    '''Replay the checksum chain; report the first entry that does not match.
       With an expected root, a truncated ledger fails at its length.'''
    previous = GENESIS
    for index, entry in enumerate(ledger.entries):
        if chain_checksum(previous, entry.payload) != entry.checksum:
            LOGGER.warning('ledger corrupted at entry %s', index)
            return LedgerVerification(False, index)
        previous = entry.checksum
    if root is not None and previous != root:
        LOGGER.warning('ledger root mismatch after %s entries', len(ledger.entries))
        return LedgerVerification(False, len(ledger.entries))
    return LedgerVerification(True, None)
