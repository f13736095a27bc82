"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: backend failures are reported
separately from data/validation failures.
"""


class GecError(Exception):
    """Base class for all package errors."""


# --- registry ---

class MalformedRegistry(GecError):
    """Registry file does not follow the `<type>: w1, w2, ...` line format."""


class DuplicateWordInSet(GecError):
    """The same word occurs twice within one confusion set."""


class EmptySet(GecError):
    """A registry or confusion set has too few entries to be usable."""


class UnknownErrorType(GecError):
    """An error type was requested that the registry does not define."""


# --- corpus ---

class MalformedRow(GecError):
    """A corpus row does not have the expected three tab-separated fields."""


class MissingOrMultipleMaskSlot(GecError):
    """A corpus sentence must contain exactly one [MASK] token."""


class AnswerNotInConfusionSet(GecError):
    """A sample's gold answer is not a member of its error type's set."""


class EmptyCorpus(GecError):
    """An operation that needs samples was given a corpus without any."""


# --- oracles ---

class InvalidQuery(GecError):
    """A mask query violates its structural constraints."""


class EmptyTrainingData(GecError):
    """No tokens were found in the n-gram training stream."""


class BackendUnavailable(GecError):
    """The remote scoring backend cannot be reached or misbehaves."""


# --- scoring / correction ---

class AlphaOutOfRange(GecError):
    """Fusion weight must lie in [0, 1]."""


class SlotOutOfRange(GecError):
    """Slot index does not point at a token of the sentence."""
