"""Typed exceptions raised across the library.

Callers that need coarse-grained handling can catch :class:`EmogaitError`;
the CLI maps these onto its exit-status taxonomy.  Exponent overflow in the
matrix exponential raises the builtin :class:`OverflowError`.
"""


class EmogaitError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatchError(EmogaitError, ValueError):
    """Operands have incompatible matrix or vector dimensions."""


class EmptyInputError(EmogaitError, ValueError):
    """An operation requiring at least one element received none."""


class NotPositiveDefiniteError(EmogaitError, ValueError):
    """A matrix failed the positive-definiteness floor."""


class IterationFailure(EmogaitError, RuntimeError):
    """The eigensolver did not converge within its iteration cap."""


class DegenerateTorsoError(EmogaitError, ValueError):
    """Torso joints at the reference frame do not span a plane."""


class TooFewFramesError(EmogaitError, ValueError):
    """A sequence or feature set has fewer than two frames."""


class InvalidWindowError(EmogaitError, ValueError):
    """A sub-window does not fit inside the sequence."""


class KTooLargeError(EmogaitError, ValueError):
    """k exceeds the number of training descriptors."""


class SingleSubjectError(EmogaitError, ValueError):
    """Leave-one-subject-out folding needs at least two subjects."""


class LabelMismatchError(EmogaitError, ValueError):
    """Confusion matrices with different label orderings were combined."""


class InvalidParamsError(EmogaitError, ValueError):
    """Generator parameters are out of range."""


class ParseError(EmogaitError, ValueError):
    """A file could not be parsed; carries the offending location."""

    def __init__(self, message, *, path=None, line=None, column=None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if column is not None:
            loc.append(f"column {column}")
        prefix = ": ".join(loc)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.line = line
        self.column = column


class JointCountMismatchError(ParseError):
    """A frame line does not hold exactly 3 * n_joints coordinates."""


class NonFiniteValueError(ParseError):
    """A parsed coordinate is NaN or infinite."""


class SchemaVersionError(EmogaitError, ValueError):
    """A serialized file declares an unsupported format or version."""
