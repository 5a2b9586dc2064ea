"""
Real cos/sin Fourier bases over the variable axis (F_M) and the time axis (F_H), and the 2-D
transform they define:

    C = F_M · Y · F_Hᵀ          (forward)
    Ŷ = F_Mᵀ · C · F_H          (inverse, no normalization)
"""

from typing import Tuple
from typing import Union

import attr
import numpy
from typing_extensions import Literal

from nftcast.exceptions import DimensionError
from nftcast.exceptions import DomainError
from nftcast.tensor import Tensor
from nftcast.tensor import Transpose

__all__ = [
    "BasisTarget",
    "BuildFourierBasisPair",
    "BuildTimeFourierMatrix",
    "BuildVariableFourierMatrix",
    "FourierBasisPair",
    "Forward2dDft",
    "Inverse2dDft",
    "FourierRowCount",
]

BasisTarget = Literal["forecast", "backcast"]


def FourierRowCount(size: int) -> int:
    """
    :returns:
        Number of rows of a cos/sin basis driven by `size`: one cos and one sin row for each
        frequency 0..floor(size/2).
    """
    return 2 * (size // 2 + 1)


def _CosSinRows(frequencies: int, length: int) -> numpy.ndarray:
    """
    Rows cos(2π·f·j/length) for f = 0..frequencies-1, followed by the matching sin rows.

    Angles are reduced to integer multiples of 2π/length first and quarter turns get exact
    values, so e.g. the Nyquist sin row is exactly zero.
    """
    f = numpy.arange(frequencies)[:, None]
    j = numpy.arange(length)[None, :]
    turns = (f * j) % length
    angle = 2.0 * numpy.pi * turns / length
    cos = numpy.cos(angle)
    sin = numpy.sin(angle)

    quarter = (4 * turns) % length == 0
    quadrant = (4 * turns) // length
    cos = numpy.where(quarter, numpy.choose(quadrant % 4, [1.0, 0.0, -1.0, 0.0]), cos)
    sin = numpy.where(quarter, numpy.choose(quadrant % 4, [0.0, 1.0, 0.0, -1.0]), sin)
    return numpy.vstack([cos, sin])


def BuildVariableFourierMatrix(m: int) -> Tensor:
    """
    F_M: the cos/sin basis over the variable axis.

    :param m:
        Number of variables.

    :returns:
        Tensor [2·(floor(m/2)+1) × m].

    :raises DomainError:
        If m < 1.
    """
    if m < 1:
        raise DomainError(f"Variable count must be at least 1, got {m}")
    return Tensor(_CosSinRows(m // 2 + 1, m))


def BuildTimeFourierMatrix(n: int, length: int) -> Tensor:
    """
    F_H: the cos/sin basis over the time axis.

    :param n:
        Fourier order; drives the number of frequencies (0..floor(n/2)).

    :param length:
        Number of time steps (the horizon H for forecasts, the lookback t for backcasts).

    :returns:
        Tensor [2·(floor(n/2)+1) × length].

    :raises DomainError:
        If n or length is below 1.
    """
    if n < 1 or length < 1:
        raise DomainError(f"Fourier order and length must be at least 1, got {n} and {length}")
    return Tensor(_CosSinRows(n // 2 + 1, length))


@attr.s(auto_attribs=True, frozen=True)
class FourierBasisPair:
    """
    Fixed bases used by a seasonality block: one F_M shared by forecast and backcast, and one
    F_H for each time length.
    """

    f_m: Tensor
    f_h_forecast: Tensor
    f_h_backcast: Tensor
    fourier_order: int
    variables: int

    def GetCoefficientShape(self) -> Tuple[int, int]:
        """
        :returns:
            (K_M, K_N), the shape of a coefficient matrix C.
        """
        return self.f_m.shape[0], self.f_h_forecast.shape[0]

    def GetTimeBasis(self, target: BasisTarget) -> Tensor:
        if target == "forecast":
            return self.f_h_forecast
        if target == "backcast":
            return self.f_h_backcast
        raise DomainError(f"Unknown basis target: {target!r}")


def BuildFourierBasisPair(
    variables: int, fourier_order: int, lookback: int, horizon: int
) -> FourierBasisPair:
    return FourierBasisPair(
        f_m=BuildVariableFourierMatrix(variables),
        f_h_forecast=BuildTimeFourierMatrix(fourier_order, horizon),
        f_h_backcast=BuildTimeFourierMatrix(fourier_order, lookback),
        fourier_order=fourier_order,
        variables=variables,
    )


def Forward2dDft(
    y: Tensor, basis: FourierBasisPair, target: BasisTarget = "forecast"
) -> Tensor:
    """
    C = F_M · Y · F_Hᵀ.

    :param y:
        [M × L], or batched [batch × M × L], where L is the length of the selected time basis.

    :param target:
        Which time basis to use: "forecast" (L = H) or "backcast" (L = t).

    :returns:
        [K_M × K_N] (batched when y is).
    """
    f_h = basis.GetTimeBasis(target)
    if y.rank not in (2, 3) or y.shape[-2:] != (basis.f_m.shape[1], f_h.shape[1]):
        raise DimensionError("Forward2dDft", y.shape, basis.f_m.shape, f_h.shape)
    # Z = F_M · Y only lives for the duration of this call.
    z = basis.f_m @ y
    return z @ Transpose(f_h)


def Inverse2dDft(
    c: Union[Tensor, numpy.ndarray], basis: FourierBasisPair, target: BasisTarget = "forecast"
) -> Tensor:
    """
    Ŷ = F_Mᵀ · C · F_H, without normalization.

    :param c:
        Coefficients [K_M × K_N], or batched [batch × K_M × K_N].

    :returns:
        [M × L] (batched when c is), with L the length of the selected time basis.
    """
    if not isinstance(c, Tensor):
        c = Tensor(c)
    f_h = basis.GetTimeBasis(target)
    if c.rank not in (2, 3) or c.shape[-2:] != basis.GetCoefficientShape():
        raise DimensionError("Inverse2dDft", c.shape, basis.GetCoefficientShape())
    return Transpose(basis.f_m) @ (c @ f_h)
