"""
Blocks map their input window to a backcast (its reconstruction of the input) and a forecast.

Seasonality blocks emit 2-D Fourier coefficients C and expand them with Ŷ = F_Mᵀ · C · F_H.
Trend blocks emit polynomial coefficients A and expand them with Ŷ = A · P.
Generic blocks emit the backcast and forecast values directly.
"""

from typing import List
from typing import Optional
from typing import Tuple

import numpy
from oop_ext.interface import ImplementsInterface
from oop_ext.interface import Interface
from oop_ext.interface import TypeCheckingSupport
from typing_extensions import Literal

from nftcast.bases import BuildFourierBasisPair
from nftcast.bases import BuildTrendBasisPair
from nftcast.bases import FourierBasisPair
from nftcast.bases import Inverse2dDft
from nftcast.bases import TrendBasisPair
from nftcast.exceptions import DimensionError
from nftcast.tensor import AsTensor
from nftcast.tensor import Parameter
from nftcast.tensor import Reshape
from nftcast.tensor import Tensor

from ._learners import AffineLayer
from ._learners import ICoefficientLearner
from ._learners import InitializeAffine

__all__ = [
    "BLOCK_KINDS",
    "BlockKind",
    "GenericBlock",
    "IBlock",
    "SeasonalityBlock",
    "TrendBlock",
]

BlockKind = Literal["trend", "seasonality", "generic"]
BLOCK_KINDS: Tuple[BlockKind, ...] = ("trend", "seasonality", "generic")

# (forecast coefficients, backcast coefficients), each batched.
Coefficients = Tuple[numpy.ndarray, numpy.ndarray]


class IBlock(Interface, TypeCheckingSupport):
    """
    One block of a stack.
    """

    def GetKind(self) -> BlockKind:  # type:ignore[empty-body]
        """
        :returns:
            "trend", "seasonality" or "generic".
        """

    def GetParameters(self) -> List[Parameter]:  # type:ignore[empty-body]
        """
        :returns:
            Trunk parameters followed by head parameters.
        """

    def Forward(self, x: Tensor) -> Tuple[Tensor, Tensor]:  # type:ignore[empty-body]
        """
        :param x:
            Block input (residual), [batch × M × t].

        :returns:
            (backcast [batch × M × t], forecast [batch × M × H]).
        """

    def GetLastCoefficients(self) -> Optional[Coefficients]:  # type:ignore[empty-body]
        """
        :returns:
            The (forecast, backcast) coefficient arrays emitted by the last `Forward`, or None
            if there was none or the block has no basis.
        """


class _Block:
    """
    Shared plumbing: a trunk and two affine heads producing `head_sizes` values each.
    """

    kind: BlockKind

    def __init__(
        self,
        learner: ICoefficientLearner,
        variables: int,
        lookback: int,
        horizon: int,
        head_sizes: Tuple[int, int],
        rng: numpy.random.Generator,
        prefix: str,
    ) -> None:
        self._learner = learner
        self._variables = variables
        self._lookback = lookback
        self._horizon = horizon
        features = learner.GetFeatureSize()
        self._head_forecast = InitializeAffine(
            f"{prefix}.forecast_head", features, head_sizes[0], rng
        )
        self._head_backcast = InitializeAffine(
            f"{prefix}.backcast_head", features, head_sizes[1], rng
        )
        self._last_coefficients: Optional[Coefficients] = None

    def GetKind(self) -> BlockKind:
        return self.kind

    def GetLearner(self) -> ICoefficientLearner:
        return self._learner

    def GetHeads(self) -> Tuple[AffineLayer, AffineLayer]:
        """
        :returns:
            (forecast head, backcast head).
        """
        return self._head_forecast, self._head_backcast

    def GetParameters(self) -> List[Parameter]:
        return (
            self._learner.GetParameters()
            + self._head_forecast.GetParameters()
            + self._head_backcast.GetParameters()
        )

    def GetLastCoefficients(self) -> Optional[Coefficients]:
        return self._last_coefficients

    def _Heads(self, x: Tensor) -> Tuple[Tensor, Tensor]:
        x = AsTensor(x)
        if x.rank != 3 or x.shape[1:] != (self._variables, self._lookback):
            raise DimensionError(
                f"{type(self).__name__}.Forward", x.shape, (self._variables, self._lookback)
            )
        features = self._learner.Features(x)
        return self._head_forecast.Apply(features), self._head_backcast.Apply(features)


@ImplementsInterface(IBlock)
class SeasonalityBlock(_Block):

    kind: BlockKind = "seasonality"

    def __init__(
        self,
        learner: ICoefficientLearner,
        variables: int,
        lookback: int,
        horizon: int,
        fourier_order: int,
        rng: numpy.random.Generator,
        prefix: str,
    ) -> None:
        self._basis = BuildFourierBasisPair(variables, fourier_order, lookback, horizon)
        k_m, k_n = self._basis.GetCoefficientShape()
        _Block.__init__(
            self, learner, variables, lookback, horizon, (k_m * k_n, k_m * k_n), rng, prefix
        )

    def GetBasis(self) -> FourierBasisPair:
        return self._basis

    def Forward(self, x: Tensor) -> Tuple[Tensor, Tensor]:
        theta_f, theta_b = self._Heads(x)
        shape = (theta_f.shape[0],) + self._basis.GetCoefficientShape()
        c_f = Reshape(theta_f, shape)
        c_b = Reshape(theta_b, shape)
        self._last_coefficients = (c_f.data, c_b.data)
        return (
            Inverse2dDft(c_b, self._basis, "backcast"),
            Inverse2dDft(c_f, self._basis, "forecast"),
        )


@ImplementsInterface(IBlock)
class TrendBlock(_Block):

    kind: BlockKind = "trend"

    def __init__(
        self,
        learner: ICoefficientLearner,
        variables: int,
        lookback: int,
        horizon: int,
        degree: int,
        rng: numpy.random.Generator,
        prefix: str,
    ) -> None:
        self._basis = BuildTrendBasisPair(degree, lookback, horizon)
        size = variables * degree
        _Block.__init__(self, learner, variables, lookback, horizon, (size, size), rng, prefix)

    def GetBasis(self) -> TrendBasisPair:
        return self._basis

    def Forward(self, x: Tensor) -> Tuple[Tensor, Tensor]:
        theta_f, theta_b = self._Heads(x)
        shape = (theta_f.shape[0], self._variables, self._basis.degree)
        a_f = Reshape(theta_f, shape)
        a_b = Reshape(theta_b, shape)
        self._last_coefficients = (a_f.data, a_b.data)
        return a_b @ self._basis.p_backcast, a_f @ self._basis.p_forecast


@ImplementsInterface(IBlock)
class GenericBlock(_Block):
    """
    No fixed basis: the heads emit backcast and forecast values directly.
    """

    kind: BlockKind = "generic"

    def __init__(
        self,
        learner: ICoefficientLearner,
        variables: int,
        lookback: int,
        horizon: int,
        rng: numpy.random.Generator,
        prefix: str,
    ) -> None:
        _Block.__init__(
            self,
            learner,
            variables,
            lookback,
            horizon,
            (variables * horizon, variables * lookback),
            rng,
            prefix,
        )

    def Forward(self, x: Tensor) -> Tuple[Tensor, Tensor]:
        theta_f, theta_b = self._Heads(x)
        batch = theta_f.shape[0]
        return (
            Reshape(theta_b, (batch, self._variables, self._lookback)),
            Reshape(theta_f, (batch, self._variables, self._horizon)),
        )
