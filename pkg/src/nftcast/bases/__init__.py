"""
Fixed (non-learned) bases: real Fourier matrices for seasonality and Vandermonde matrices for
trend.
"""

from ._fourier import BasisTarget
from ._fourier import BuildFourierBasisPair
from ._fourier import BuildTimeFourierMatrix
from ._fourier import BuildVariableFourierMatrix
from ._fourier import FourierBasisPair
from ._fourier import FourierRowCount
from ._fourier import Forward2dDft
from ._fourier import Inverse2dDft
from ._vandermonde import BuildTrendBasisPair
from ._vandermonde import BuildVandermonde
from ._vandermonde import TrendBasisPair

__all__ = [
    "BasisTarget",
    "BuildFourierBasisPair",
    "BuildTimeFourierMatrix",
    "BuildTrendBasisPair",
    "BuildVandermonde",
    "BuildVariableFourierMatrix",
    "FourierBasisPair",
    "FourierRowCount",
    "Forward2dDft",
    "Inverse2dDft",
    "TrendBasisPair",
]
