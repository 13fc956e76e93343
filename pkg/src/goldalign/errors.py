"""Exception taxonomy shared across the toolkit.

Every domain error derives from GoldalignError so the CLI can map the whole
family to exit status 1; most also derive from a fitting builtin so callers
using plain ``except ValueError`` keep working.
"""


class GoldalignError(Exception):
    """Base class for all domain errors raised by this package."""


class BitextAlignmentError(GoldalignError, ValueError):
    """The two halves of a bitext (or the id file) have different line counts."""


class BitextFormatError(GoldalignError, ValueError):
    """Malformed bitext input: bad UTF-8, duplicate verse ids, empty verses."""


class SamplingInfeasibleError(GoldalignError, RuntimeError):
    """A stratum ran out of candidate types before a conflict-free sample existed."""

    def __init__(self, message: str, stratum_frequency: int):
        super().__init__(message)
        self.stratum_frequency = stratum_frequency


class InvalidPositionError(GoldalignError, ValueError):
    """A link or NT mark names a token position outside the verse."""


class DuplicatePositionError(GoldalignError, ValueError):
    """A token position appears in more than one link group or NT mark."""


class AnnotationStateError(GoldalignError, ValueError):
    """An operation was applied to an annotation in the wrong state."""


class AlignmentParseError(GoldalignError, ValueError):
    """An alignment file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UndefinedRateError(GoldalignError, ArithmeticError):
    """A rate's denominator is empty (e.g. precision of an empty link set)."""


class CoverageMismatchError(GoldalignError, ValueError):
    """Two annotators (or an annotator and a pooling plan) cover different verses."""


class LexiconCoverageError(GoldalignError, ValueError):
    """A focus word instance is not covered by the supplied annotations."""
