"""
Exceptions raised by the simulator, all derived from ValueError.
"""


class BubbleSwitchError(ValueError):
    "Base class for all errors of the package."


class LayoutError(BubbleSwitchError):
    "Unknown, missing or duplicate subsystem labels, or mismatched layouts."


class NormalizationError(BubbleSwitchError):
    "A zero vector cannot be normalized."


class OrthonormalityError(BubbleSwitchError):
    "Defining pairs of an isometry are not orthonormal."


class BasisError(BubbleSwitchError):
    "Measurement projectors do not form a complete orthogonal family."


class ConfigError(BubbleSwitchError):
    "Parameter out of range."


class SprtError(BubbleSwitchError):
    "Inconsistent input to the sequential test."


class LedgerError(BubbleSwitchError):
    "Malformed ledger content."
