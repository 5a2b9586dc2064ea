"""
Dilated causal temporal convolution network (TCN).

A network is a sequence of residual units, one per dilation. Each unit applies two dilated
causal convolutions, each followed by a rectifier, and adds a skip connection (identity, or a
1×1 convolution when the channel count changes):

    out = relu(conv2(relu(conv1(x)))) + skip(x)
"""

from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import attr
import numpy

from nftcast.exceptions import DimensionError
from nftcast.tensor import Add
from nftcast.tensor import AsTensor
from nftcast.tensor import Parameter
from nftcast.tensor import RecordOperation
from nftcast.tensor import Relu
from nftcast.tensor import Tensor

__all__ = [
    "CausalConv1d",
    "ConvLayerParams",
    "InitializeConvLayer",
    "InitializeTcn",
    "ReceptiveField",
    "ResidualUnitParams",
    "TCNConfig",
    "TcnForward",
    "TemporalConvNet",
]


def _Positive(instance: object, attribute: "attr.Attribute[int]", value: int) -> None:
    if value < 1:
        raise ValueError(f"{attribute.name} must be at least 1, got {value}")


def _ValidDilations(
    instance: object, attribute: "attr.Attribute[Tuple[int, ...]]", value: Tuple[int, ...]
) -> None:
    if not value:
        raise ValueError("dilations must not be empty")
    if any(d < 1 for d in value):
        raise ValueError(f"dilations must be at least 1, got {list(value)}")


@attr.s(auto_attribs=True, frozen=True)
class TCNConfig:
    """
    Shape of a temporal convolution network. The activation is always the rectifier.

    :ivar in_channels:
        Channels of the input (the number of variables M).

    :ivar dilations:
        One residual unit per entry.
    """

    in_channels: int = attr.ib(validator=_Positive)
    hidden_channels: int = attr.ib(default=32, validator=_Positive)
    kernel_size: int = attr.ib(default=3, validator=_Positive)
    dilations: Tuple[int, ...] = attr.ib(
        default=(1, 2, 4), converter=tuple, validator=_ValidDilations
    )


@attr.s(auto_attribs=True, frozen=True)
class ConvLayerParams:
    """
    :ivar weight:
        [out_channels × in_channels × kernel_size]

    :ivar bias:
        [out_channels]
    """

    weight: Parameter
    bias: Parameter

    def GetParameters(self) -> List[Parameter]:
        return [self.weight, self.bias]


@attr.s(auto_attribs=True, frozen=True)
class ResidualUnitParams:

    conv1: ConvLayerParams
    conv2: ConvLayerParams
    # None means identity skip.
    skip: Optional[ConvLayerParams] = None

    def GetParameters(self) -> List[Parameter]:
        result = self.conv1.GetParameters() + self.conv2.GetParameters()
        if self.skip is not None:
            result += self.skip.GetParameters()
        return result


def CausalConv1d(x: Tensor, params: ConvLayerParams, dilation: int) -> Tensor:
    """
    output[b, o, s] = bias[o] + Σ_{c, κ} weight[o, c, κ] · x[b, c, s − dilation·(k−1−κ)]

    Inputs before time 0 are taken as zero, so the output has the same length as the input and
    never depends on later times.

    :param x:
        [batch × in_channels × L]

    :raises DimensionError:
        If channel counts do not match or dilation < 1.
    """
    x = AsTensor(x)
    weight, bias = params.weight, params.bias
    out_channels, in_channels, k = weight.shape
    if x.rank != 3 or x.shape[1] != in_channels or bias.shape != (out_channels,):
        raise DimensionError("CausalConv1d", x.shape, weight.shape, bias.shape)
    if dilation < 1:
        raise DimensionError(
            "CausalConv1d", x.shape, weight.shape, detail=f"dilation {dilation}"
        )

    batch, _, length = x.shape
    pad = dilation * (k - 1)
    padded = numpy.pad(x.data, ((0, 0), (0, 0), (pad, 0)))
    taps = [padded[:, :, kappa * dilation : kappa * dilation + length] for kappa in range(k)]
    columns = numpy.stack(taps, axis=2).reshape(batch, in_channels * k, length)
    flat_weight = weight.data.reshape(out_channels, in_channels * k)
    out = numpy.matmul(flat_weight, columns) + bias.data[None, :, None]

    def CausalConv1dBackward(grad: numpy.ndarray) -> Sequence[numpy.ndarray]:
        grad_weight = numpy.tensordot(grad, columns, axes=([0, 2], [0, 2]))
        grad_bias = grad.sum(axis=(0, 2))
        grad_columns = numpy.matmul(flat_weight.T, grad).reshape(batch, in_channels, k, length)
        grad_padded = numpy.zeros_like(padded)
        for kappa in range(k):
            grad_padded[:, :, kappa * dilation : kappa * dilation + length] += grad_columns[
                :, :, kappa, :
            ]
        return (
            grad_padded[:, :, pad:],
            grad_weight.reshape(weight.shape),
            grad_bias,
        )

    return RecordOperation(out, (x, weight, bias), CausalConv1dBackward)


def ReceptiveField(config: TCNConfig) -> int:
    """
    :returns:
        Number of input time steps (including the current one) that can influence one output
        step: 1 + Σ 2·(k−1)·dilation, two convolutions per residual unit.
    """
    return 1 + sum(2 * (config.kernel_size - 1) * d for d in config.dilations)


def InitializeConvLayer(
    id: str, in_channels: int, out_channels: int, kernel_size: int, rng: numpy.random.Generator
) -> ConvLayerParams:
    """
    Weights uniform in [−a, a] with a = 1/sqrt(in_channels·kernel_size); biases zero.
    """
    bound = 1.0 / numpy.sqrt(in_channels * kernel_size)
    weight = rng.uniform(-bound, bound, size=(out_channels, in_channels, kernel_size))
    return ConvLayerParams(
        weight=Parameter(f"{id}.weight", weight),
        bias=Parameter(f"{id}.bias", numpy.zeros(out_channels)),
    )


def InitializeTcn(
    config: TCNConfig, rng: numpy.random.Generator, prefix: str = "tcn"
) -> List[ResidualUnitParams]:
    units = []
    channels = config.in_channels
    for i, _dilation in enumerate(config.dilations):
        hidden = config.hidden_channels
        unit_id = f"{prefix}.unit{i}"
        conv1 = InitializeConvLayer(f"{unit_id}.conv1", channels, hidden, config.kernel_size, rng)
        conv2 = InitializeConvLayer(f"{unit_id}.conv2", hidden, hidden, config.kernel_size, rng)
        skip = None
        if channels != hidden:
            skip = InitializeConvLayer(f"{unit_id}.skip", channels, hidden, 1, rng)
        units.append(ResidualUnitParams(conv1, conv2, skip))
        channels = hidden
    return units


def TcnForward(
    x: Tensor, config: TCNConfig, params: Sequence[ResidualUnitParams]
) -> Tensor:
    """
    :param x:
        [batch × M × t]

    :returns:
        [batch × hidden_channels × t]
    """
    if len(params) != len(config.dilations):
        raise DimensionError(
            "TcnForward", (len(params),), (len(config.dilations),), detail="unit count"
        )
    h = AsTensor(x)
    for unit, dilation in zip(params, config.dilations):
        inner = Relu(CausalConv1d(h, unit.conv1, dilation))
        inner = Relu(CausalConv1d(inner, unit.conv2, dilation))
        skip = h if unit.skip is None else CausalConv1d(h, unit.skip, 1)
        h = Add(inner, skip)
    return h


class TemporalConvNet:
    """
    A TCN bundled with its parameters.
    """

    def __init__(
        self, config: TCNConfig, rng: numpy.random.Generator, prefix: str = "tcn"
    ) -> None:
        self._config = config
        self._units = InitializeTcn(config, rng, prefix)

    def GetConfig(self) -> TCNConfig:
        return self._config

    config = property(GetConfig)

    def GetUnits(self) -> List[ResidualUnitParams]:
        return self._units

    def GetParameters(self) -> List[Parameter]:
        result: List[Parameter] = []
        for unit in self._units:
            result += unit.GetParameters()
        return result

    def GetReceptiveField(self) -> int:
        return ReceptiveField(self._config)

    def Forward(self, x: Tensor) -> Tensor:
        return TcnForward(x, self._config, self._units)
