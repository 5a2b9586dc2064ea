"""
Errors raised by nftcast.

Every error derives from `NftError`, so callers that only care about "something in the
forecasting pipeline failed" can catch a single class.
"""

from typing import Any
from typing import Optional
from typing import Sequence
from typing import Tuple

__all__ = [
    "CheckpointError",
    "ComparisonError",
    "CompatibilityError",
    "ConfigurationError",
    "DegenerateInputError",
    "DimensionError",
    "DivergenceError",
    "DomainError",
    "EmptyDatasetError",
    "EvaluationError",
    "ImputationError",
    "NftError",
    "ParseError",
]


class NftError(RuntimeError):
    """
    Base class for errors raised by nftcast.
    """


class DimensionError(NftError, ValueError):
    """
    Error raised when the shapes given to an operation do not conform.
    """

    def __init__(self, operation: str, *shapes: Sequence[int], detail: str = "") -> None:
        """
        :param operation:
            Name of the operation which rejected the shapes.

        :param shapes:
            Every shape involved, in argument order.

        :param detail:
            Optional extra explanation appended to the message.
        """
        shapes_str = " and ".join(str(list(s)) for s in shapes)
        msg = f"{operation}: incompatible shapes {shapes_str}"
        if detail:
            msg += f" ({detail})"
        NftError.__init__(self, msg)
        self.operation = operation
        self.shapes: Tuple[Tuple[int, ...], ...] = tuple(tuple(s) for s in shapes)


class DomainError(NftError, ValueError):
    """
    Error raised when an argument lies outside the domain of an operation (e.g.: a basis with
    zero rows, an improvement percentage against a non-positive baseline).
    """


class EvaluationError(NftError):
    """
    Error raised when a function being evaluated produces a non-finite value.
    """


class ConfigurationError(NftError):
    """
    Error raised on invalid configuration: bad config keys or values, empty splits, too few
    series for a protocol, etc.
    """


class EmptyDatasetError(ConfigurationError):
    """
    Error raised when windowing produces no window at all.
    """

    def __init__(self, lookback: int, horizon: int, lengths: Sequence[int]) -> None:
        msg = (
            f"No series is long enough for lookback={lookback} + horizon={horizon}"
            f" (series lengths: {list(lengths)})"
        )
        ConfigurationError.__init__(self, msg)


class DivergenceError(NftError):
    """
    Error raised when the training loss stops being finite.
    """

    def __init__(self, epoch: int, loss: float) -> None:
        NftError.__init__(self, f"Training diverged at epoch {epoch}: loss is {loss}")
        self.epoch = epoch
        self.loss = loss


class ParseError(NftError):
    """
    Error raised when an input file cannot be parsed.
    """

    def __init__(self, path: Any, reason: str, line: Optional[int] = None) -> None:
        """
        :param path:
            The file being parsed.

        :param reason:
            What is wrong.

        :param line:
            1-based line number in the file, if known.
        """
        if line is None:
            msg = f"{path}: {reason}"
        else:
            msg = f"{path}, line {line}: {reason}"
        NftError.__init__(self, msg)
        self.path = path
        self.line = line


class ImputationError(NftError):
    """
    Error raised when a variable has no observed value to impute from.
    """

    def __init__(self, variable: str) -> None:
        NftError.__init__(
            self, f"Variable {variable!r} has no observed value in the training region"
        )
        self.variable = variable


class DegenerateInputError(NftError, ValueError):
    """
    Error raised when a statistic is undefined for the given data (e.g.: zero variance).
    """


class CompatibilityError(NftError):
    """
    Error raised when a checkpoint does not match the data it is applied to.
    """

    def __init__(self, what: str, expected: Any, actual: Any) -> None:
        NftError.__init__(
            self, f"Checkpoint is incompatible: {what} is {expected} but data has {actual}"
        )


class ComparisonError(NftError):
    """
    Error raised when two metrics reports cannot be compared.
    """


class CheckpointError(NftError):
    """
    Error raised when a checkpoint file is malformed or of an unsupported version.
    """
