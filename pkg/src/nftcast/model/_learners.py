"""
Coefficient learners: trunks mapping a lookback window [batch × M × t] to a feature matrix
[batch × F] from which each block's affine heads produce basis coefficients.
"""

from typing import List

import attr
import numpy
from oop_ext.interface import ImplementsInterface
from oop_ext.interface import Interface
from oop_ext.interface import TypeCheckingSupport

from nftcast.exceptions import DimensionError
from nftcast.tcn import TCNConfig
from nftcast.tcn import TemporalConvNet
from nftcast.tensor import Add
from nftcast.tensor import MatMul
from nftcast.tensor import Parameter
from nftcast.tensor import Relu
from nftcast.tensor import Reshape
from nftcast.tensor import Tensor

__all__ = [
    "AffineLayer",
    "FcLearner",
    "ICoefficientLearner",
    "InitializeAffine",
    "TcnLearner",
]


class ICoefficientLearner(Interface, TypeCheckingSupport):
    """
    Subnetwork of a block that turns the block input into features for its coefficient heads.
    """

    def GetFeatureSize(self) -> int:  # type:ignore[empty-body]
        """
        :returns:
            F, the number of features per window.
        """

    def GetParameters(self) -> List[Parameter]:  # type:ignore[empty-body]
        """
        :returns:
            Every learnable parameter, in a fixed order.
        """

    def Features(self, x: Tensor) -> Tensor:  # type:ignore[empty-body]
        """
        :param x:
            [batch × M × t]

        :returns:
            [batch × F]
        """


@attr.s(auto_attribs=True, frozen=True)
class AffineLayer:
    """
    y = x · weight + bias

    :ivar weight:
        [in × out]

    :ivar bias:
        [out]
    """

    weight: Parameter
    bias: Parameter

    def GetParameters(self) -> List[Parameter]:
        return [self.weight, self.bias]

    def Apply(self, x: Tensor) -> Tensor:
        """
        :param x:
            [batch × in]
        """
        return Add(MatMul(x, self.weight), self.bias)


def InitializeAffine(
    id: str, in_size: int, out_size: int, rng: numpy.random.Generator
) -> AffineLayer:
    """
    Weights uniform in [−a, a] with a = 1/sqrt(in_size); biases zero.
    """
    bound = 1.0 / numpy.sqrt(in_size)
    return AffineLayer(
        weight=Parameter(f"{id}.weight", rng.uniform(-bound, bound, size=(in_size, out_size))),
        bias=Parameter(f"{id}.bias", numpy.zeros(out_size)),
    )


@ImplementsInterface(ICoefficientLearner)
class TcnLearner:
    """
    Temporal convolution trunk; the features are the channels of its last time step, so they
    depend on the whole receptive field ending at the most recent observation.
    """

    def __init__(self, config: TCNConfig, rng: numpy.random.Generator, prefix: str) -> None:
        self._network = TemporalConvNet(config, rng, prefix)

    def GetNetwork(self) -> TemporalConvNet:
        return self._network

    def GetFeatureSize(self) -> int:
        return self._network.config.hidden_channels

    def GetParameters(self) -> List[Parameter]:
        return self._network.GetParameters()

    def Features(self, x: Tensor) -> Tensor:
        return self._network.Forward(x)[:, :, -1]


@ImplementsInterface(ICoefficientLearner)
class FcLearner:
    """
    Fully connected trunk over the flattened window ([M × t] → M·t values), followed by a
    rectifier after every layer.
    """

    def __init__(
        self,
        variables: int,
        lookback: int,
        layers: int,
        units: int,
        rng: numpy.random.Generator,
        prefix: str,
    ) -> None:
        if layers < 1 or units < 1:
            raise DimensionError(
                "FcLearner", (layers,), (units,), detail="layers and units must be at least 1"
            )
        self._input_shape = (variables, lookback)
        self._units = units
        sizes = [variables * lookback] + [units] * layers
        self._layers = [
            InitializeAffine(f"{prefix}.fc{i}", sizes[i], sizes[i + 1], rng) for i in range(layers)
        ]

    def GetFeatureSize(self) -> int:
        return self._units

    def GetParameters(self) -> List[Parameter]:
        result: List[Parameter] = []
        for layer in self._layers:
            result += layer.GetParameters()
        return result

    def Features(self, x: Tensor) -> Tensor:
        if x.rank != 3 or x.shape[1:] != self._input_shape:
            raise DimensionError("FcLearner", x.shape, self._input_shape)
        h = Reshape(x, (x.shape[0], self._input_shape[0] * self._input_shape[1]))
        for layer in self._layers:
            h = Relu(layer.Apply(h))
        return h
