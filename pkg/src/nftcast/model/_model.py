"""
The full forecaster: stacks of blocks wired doubly-residually.

    residual_0 = x
    (b_i, f_i) = block_i(residual_i)
    residual_{i+1} = residual_i − b_i
    per_stack[k] = Σ_{i ∈ stack k} f_i
    total = Σ_k per_stack[k]
"""

import logging
from typing import Any
from typing import Dict
from typing import List
from typing import Tuple

import attr
import numpy
from typing_extensions import Literal

from nftcast.exceptions import CompatibilityError
from nftcast.exceptions import ConfigurationError
from nftcast.exceptions import DimensionError
from nftcast.tcn import TCNConfig
from nftcast.tensor import Add
from nftcast.tensor import AsTensor
from nftcast.tensor import Parameter
from nftcast.tensor import Reshape
from nftcast.tensor import Subtract
from nftcast.tensor import Tensor

from ._blocks import BLOCK_KINDS
from ._blocks import BlockKind
from ._blocks import GenericBlock
from ._blocks import IBlock
from ._blocks import SeasonalityBlock
from ._blocks import TrendBlock
from ._learners import FcLearner
from ._learners import ICoefficientLearner
from ._learners import TcnLearner

__all__ = [
    "BuildModel",
    "DecomposeForecast",
    "ForecastDecomposition",
    "LearnerKind",
    "ModelConfig",
    "ModelForward",
    "NFTModel",
]

logger = logging.getLogger(__name__)

LearnerKind = Literal["tcn", "fc"]


def _AtLeastOne(instance: object, attribute: "attr.Attribute[int]", value: int) -> None:
    if value < 1:
        raise ConfigurationError(f"{attribute.name} must be at least 1, got {value}")


def _ValidStacks(instance: object, attribute: object, value: Tuple[str, ...]) -> None:
    if not value:
        raise ConfigurationError("At least one stack is needed")
    unknown = [kind for kind in value if kind not in BLOCK_KINDS]
    if unknown:
        raise ConfigurationError(f"Unknown stack kind(s) {unknown}, expected {list(BLOCK_KINDS)}")
    if len(set(value)) != len(value):
        raise ConfigurationError(f"Stack kinds must not repeat, got {list(value)}")


def _ValidLearner(instance: object, attribute: object, value: str) -> None:
    if value not in ("tcn", "fc"):
        raise ConfigurationError(f"Unknown coefficient learner {value!r}, expected 'tcn' or 'fc'")


def _ValidDilations(instance: object, attribute: object, value: Tuple[int, ...]) -> None:
    if not value or min(value) < 1:
        raise ConfigurationError(f"Dilations must be non-empty and at least 1, got {list(value)}")


def _IntTuple(value: Any) -> Tuple[int, ...]:
    return tuple(int(v) for v in value)


@attr.s(auto_attribs=True, frozen=True)
class ModelConfig:
    """
    Everything needed to rebuild a model; stored in checkpoints.

    :ivar stacks:
        Stack kinds in evaluation order, e.g. ("trend", "seasonality").

    :ivar fourier_order:
        N, drives the number of time frequencies of seasonality blocks.

    :ivar degree:
        d, the number of polynomial terms of trend blocks.

    :ivar seed:
        Seed of the parameter initialization.
    """

    variables: int = attr.ib(validator=_AtLeastOne)
    lookback: int = attr.ib(validator=_AtLeastOne)
    horizon: int = attr.ib(validator=_AtLeastOne)
    stacks: Tuple[BlockKind, ...] = attr.ib(
        default=("trend", "seasonality"), converter=tuple, validator=_ValidStacks
    )
    blocks_per_stack: int = attr.ib(default=2, validator=_AtLeastOne)
    fourier_order: int = attr.ib(default=8, validator=_AtLeastOne)
    degree: int = attr.ib(default=4, validator=_AtLeastOne)
    learner: LearnerKind = attr.ib(default="tcn", validator=_ValidLearner)
    tcn_hidden_channels: int = attr.ib(default=32, validator=_AtLeastOne)
    tcn_kernel_size: int = attr.ib(default=3, validator=_AtLeastOne)
    tcn_dilations: Tuple[int, ...] = attr.ib(
        default=(1, 2, 4), converter=_IntTuple, validator=_ValidDilations
    )
    fc_layers: int = attr.ib(default=4, validator=_AtLeastOne)
    fc_units: int = attr.ib(default=256, validator=_AtLeastOne)
    seed: int = 0

    def GetTCNConfig(self) -> TCNConfig:
        return TCNConfig(
            in_channels=self.variables,
            hidden_channels=self.tcn_hidden_channels,
            kernel_size=self.tcn_kernel_size,
            dilations=self.tcn_dilations,
        )

    def ToDict(self) -> Dict[str, Any]:
        return attr.asdict(self, retain_collection_types=False)

    @classmethod
    def FromDict(cls, contents: Dict[str, Any]) -> "ModelConfig":
        names = {a.name for a in attr.fields(cls)}
        unknown = sorted(set(contents) - names)
        if unknown:
            raise ConfigurationError(f"Unknown model config keys: {unknown}")
        return cls(**contents)


@attr.s(auto_attribs=True, frozen=True)
class ForecastDecomposition:
    """
    :ivar total:
        [batch × M × H] (or [M × H] for an unbatched input).

    :ivar per_stack:
        One forecast per stack kind, in stack order; they add up to `total` exactly when summed
        in that order.

    :ivar residual:
        What is left of the input after every block's backcast was subtracted.
    """

    total: Tensor
    per_stack: Dict[str, Tensor]
    residual: Tensor

    def GetKinds(self) -> List[str]:
        return list(self.per_stack)

    def GetComponent(self, kind: str) -> numpy.ndarray:
        """
        :returns:
            The forecast of the given stack kind, or zeros when the model has no such stack.
        """
        if kind in self.per_stack:
            return self.per_stack[kind].data
        return numpy.zeros(self.total.shape)


class NFTModel:
    """
    Stacks of blocks over a fixed (M, t, H).
    """

    def __init__(self, config: ModelConfig, stacks: List[Tuple[str, List[IBlock]]]) -> None:
        self._config = config
        self._stacks = stacks

    def GetConfig(self) -> ModelConfig:
        return self._config

    config = property(GetConfig)

    def GetStacks(self) -> List[Tuple[str, List[IBlock]]]:
        return self._stacks

    def GetBlocks(self) -> List[IBlock]:
        return [block for _, blocks in self._stacks for block in blocks]

    def GetParameters(self) -> List[Parameter]:
        result: List[Parameter] = []
        for block in self.GetBlocks():
            result += block.GetParameters()
        return result

    def GetParameterValues(self) -> Dict[str, numpy.ndarray]:
        """
        :returns:
            A copy of every parameter value, by id.
        """
        return {p.id: p.value.copy() for p in self.GetParameters()}

    def SetParameterValues(self, values: Dict[str, numpy.ndarray]) -> None:
        for param in self.GetParameters():
            param.SetValue(values[param.id])

    def CheckCompatible(self, variables: int, lookback: int, horizon: int) -> None:
        """
        :raises CompatibilityError:
            If the model was built for different dimensions.
        """
        config = self._config
        for what, expected, actual in (
            ("variable count M", config.variables, variables),
            ("lookback t", config.lookback, lookback),
            ("horizon H", config.horizon, horizon),
        ):
            if expected != actual:
                raise CompatibilityError(what, expected, actual)

    def Forward(self, x: Tensor) -> ForecastDecomposition:
        return ModelForward(x, self)


def _BuildLearner(
    config: ModelConfig, rng: numpy.random.Generator, prefix: str
) -> ICoefficientLearner:
    if config.learner == "tcn":
        return TcnLearner(config.GetTCNConfig(), rng, f"{prefix}.tcn")
    return FcLearner(
        config.variables, config.lookback, config.fc_layers, config.fc_units, rng, f"{prefix}.fc"
    )


def BuildModel(config: ModelConfig) -> NFTModel:
    """
    Creates a freshly initialized model; parameter values depend only on `config` (including
    its seed).
    """
    rng = numpy.random.default_rng(config.seed)
    m, t, h = config.variables, config.lookback, config.horizon
    stacks: List[Tuple[str, List[IBlock]]] = []
    for stack_index, kind in enumerate(config.stacks):
        blocks: List[IBlock] = []
        for block_index in range(config.blocks_per_stack):
            prefix = f"stack{stack_index}.{kind}.block{block_index}"
            learner = _BuildLearner(config, rng, prefix)
            block: IBlock
            if kind == "seasonality":
                block = SeasonalityBlock(learner, m, t, h, config.fourier_order, rng, prefix)
            elif kind == "trend":
                block = TrendBlock(learner, m, t, h, config.degree, rng, prefix)
            else:
                block = GenericBlock(learner, m, t, h, rng, prefix)
            blocks.append(block)
        stacks.append((kind, blocks))

    model = NFTModel(config, stacks)
    logger.debug(
        "Built model %s with %d parameters",
        list(config.stacks),
        sum(p.value.size for p in model.GetParameters()),
    )
    return model


def ModelForward(x: Tensor, model: NFTModel) -> ForecastDecomposition:
    """
    :param x:
        [batch × M × t], or a single window [M × t].
    """
    x = AsTensor(x)
    config = model.config
    expected = (config.variables, config.lookback)
    if x.rank not in (2, 3) or x.shape[-2:] != expected:
        raise DimensionError("ModelForward", x.shape, expected)
    single = x.rank == 2
    if single:
        x = Reshape(x, (1,) + expected)

    residual = x
    per_stack: Dict[str, Tensor] = {}
    for kind, blocks in model.GetStacks():
        stack_forecast = None
        for block in blocks:
            backcast, forecast = block.Forward(residual)
            residual = Subtract(residual, backcast)
            stack_forecast = forecast if stack_forecast is None else Add(stack_forecast, forecast)
        assert stack_forecast is not None
        per_stack[kind] = stack_forecast

    components = list(per_stack.values())
    total = components[0]
    for component in components[1:]:
        total = Add(total, component)

    if single:
        forecast_shape = (config.variables, config.horizon)
        total = Reshape(total, forecast_shape)
        per_stack = {kind: Reshape(f, forecast_shape) for kind, f in per_stack.items()}
        residual = Reshape(residual, expected)
    return ForecastDecomposition(total, per_stack, residual)


def DecomposeForecast(x: Tensor, model: NFTModel) -> ForecastDecomposition:
    """
    Same as `ModelForward`; the interpretability entry point (trend, seasonality and generic
    components of the forecast).
    """
    return ModelForward(x, model)
