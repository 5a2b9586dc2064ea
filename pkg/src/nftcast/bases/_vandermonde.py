import attr
import numpy

from nftcast.exceptions import DomainError
from nftcast.tensor import Tensor

__all__ = ["BuildTrendBasisPair", "BuildVandermonde", "TrendBasisPair"]


def BuildVandermonde(degree: int, length: int) -> Tensor:
    """
    P, the polynomial basis of the trend block: entry (r, j) = (j / length) ** r.

    :param degree:
        Number of rows d (powers 0..d-1).

    :param length:
        Number of time steps L.

    :raises DomainError:
        If degree or length is below 1.
    """
    if degree < 1 or length < 1:
        raise DomainError(f"Degree and length must be at least 1, got {degree} and {length}")
    t = numpy.arange(length) / length
    return Tensor(t[None, :] ** numpy.arange(degree)[:, None])


@attr.s(auto_attribs=True, frozen=True)
class TrendBasisPair:

    p_forecast: Tensor
    p_backcast: Tensor
    degree: int


def BuildTrendBasisPair(degree: int, lookback: int, horizon: int) -> TrendBasisPair:
    return TrendBasisPair(
        p_forecast=BuildVandermonde(degree, horizon),
        p_backcast=BuildVandermonde(degree, lookback),
        degree=degree,
    )
