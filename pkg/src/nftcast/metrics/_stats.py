from typing import Sequence

import attr
import numpy
import scipy.special

from nftcast.exceptions import DegenerateInputError
from nftcast.exceptions import DimensionError
from nftcast.exceptions import DomainError

__all__ = [
    "ImprovementPercent",
    "PairedTTest",
    "PearsonCorrelation",
    "StudentTTwoSidedPValue",
    "TTestResult",
]


def ImprovementPercent(model_mse: float, baseline_mse: float) -> float:
    """
    (baseline − model) / baseline · 100: positive when the model has the lower error.

    :raises DomainError:
        If the baseline MSE is not positive.
    """
    if not baseline_mse > 0:
        raise DomainError(f"Baseline MSE must be positive, got {baseline_mse}")
    return (baseline_mse - model_mse) / baseline_mse * 100.0


def _AsPair(operation: str, a: Sequence[float], b: Sequence[float]) -> numpy.ndarray:
    x = numpy.asarray(a, dtype=numpy.float64)
    y = numpy.asarray(b, dtype=numpy.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise DimensionError(operation, x.shape, y.shape)
    if x.size < 2:
        raise DegenerateInputError(f"{operation} needs at least 2 samples, got {x.size}")
    return numpy.vstack([x, y])


def PearsonCorrelation(x: Sequence[float], y: Sequence[float]) -> float:
    """
    Sample Pearson correlation coefficient, in [−1, 1].

    :raises DegenerateInputError:
        If there are fewer than 2 samples or either sequence has zero variance.
    """
    centered = _AsPair("PearsonCorrelation", x, y)
    centered = centered - centered.mean(axis=1, keepdims=True)
    sum_squares = (centered**2).sum(axis=1)
    if not (sum_squares > 0).all():
        raise DegenerateInputError("Pearson correlation is undefined for zero-variance input")
    r = (centered[0] * centered[1]).sum() / numpy.sqrt(sum_squares[0] * sum_squares[1])
    return float(numpy.clip(r, -1.0, 1.0))


def StudentTTwoSidedPValue(t: float, degrees_of_freedom: float) -> float:
    """
    P(|T| ≥ |t|) for Student's t distribution, through the regularized incomplete beta function:
    I_{df/(df+t²)}(df/2, 1/2).
    """
    if not degrees_of_freedom > 0:
        raise DomainError(f"Degrees of freedom must be positive, got {degrees_of_freedom}")
    df = float(degrees_of_freedom)
    x = df / (df + float(t) ** 2)
    return float(scipy.special.betainc(df / 2.0, 0.5, x))


@attr.s(auto_attribs=True, frozen=True)
class TTestResult:

    t_statistic: float
    p_value: float
    degrees_of_freedom: int


def PairedTTest(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """
    Paired t-test on d = a − b: t = mean(d) / (sd(d) / √n), with the sample (n − 1) standard
    deviation and a two-sided p-value at n − 1 degrees of freedom.

    :raises DegenerateInputError:
        If there are fewer than 2 pairs or the differences have zero variance.
    """
    pair = _AsPair("PairedTTest", a, b)
    d = pair[0] - pair[1]
    n = d.size
    sd = d.std(ddof=1)
    if not sd > 0:
        raise DegenerateInputError("Paired t-test is undefined: the differences have no variance")
    t = float(d.mean() / (sd / numpy.sqrt(n)))
    return TTestResult(t, StudentTTwoSidedPValue(t, n - 1), n - 1)
