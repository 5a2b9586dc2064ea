import attr
import numpy
import pytest

from nftcast.exceptions import CompatibilityError
from nftcast.exceptions import ConfigurationError
from nftcast.exceptions import DimensionError
from nftcast.model import BuildModel
from nftcast.model import DecomposeForecast
from nftcast.model import FcLearner
from nftcast.model import ModelConfig
from nftcast.model import ModelForward
from nftcast.model import TcnLearner
from nftcast.tensor import GradCheckDetailed
from nftcast.tensor import Mean
from nftcast.tensor import Multiply
from nftcast.tensor import Subtract
from nftcast.tensor import Tensor


def _SmallConfig(**kwargs) -> ModelConfig:
    values = dict(
        variables=3,
        lookback=12,
        horizon=4,
        fourier_order=4,
        tcn_hidden_channels=4,
        tcn_kernel_size=2,
        tcn_dilations=(1, 2),
    )
    values.update(kwargs)
    return ModelConfig(**values)


def _ZeroParameters(model) -> None:
    for param in model.GetParameters():
        param.SetValue(numpy.zeros(param.shape))


def testModelConfig() -> None:
    config = ModelConfig(variables=4, lookback=48, horizon=12)
    assert config.stacks == ("trend", "seasonality")
    assert config.blocks_per_stack == 2
    assert config.fourier_order == 8
    assert config.degree == 4
    assert config.learner == "tcn"
    assert config.GetTCNConfig().in_channels == 4

    contents = config.ToDict()
    assert contents["stacks"] == ["trend", "seasonality"]
    assert ModelConfig.FromDict(contents) == config

    with pytest.raises(ConfigurationError, match="must not repeat"):
        ModelConfig(4, 48, 12, stacks=["trend", "trend"])
    with pytest.raises(ConfigurationError, match="Unknown stack kind"):
        ModelConfig(4, 48, 12, stacks=["cyclic"])
    with pytest.raises(ConfigurationError):
        ModelConfig(4, 48, 12, stacks=[])
    with pytest.raises(ConfigurationError):
        ModelConfig(4, 0, 12)
    with pytest.raises(ConfigurationError):
        ModelConfig(4, 48, 12, learner="lstm")
    with pytest.raises(ConfigurationError):
        ModelConfig(4, 48, 12, tcn_dilations=[1, 0])
    with pytest.raises(ConfigurationError, match="Unknown model config keys"):
        ModelConfig.FromDict(dict(contents, depth=3))


def testBuildModel() -> None:
    config = _SmallConfig(stacks=["trend", "seasonality", "generic"], blocks_per_stack=3)
    model = BuildModel(config)
    assert [kind for kind, _ in model.GetStacks()] == ["trend", "seasonality", "generic"]
    assert [b.GetKind() for b in model.GetBlocks()] == ["trend"] * 3 + ["seasonality"] * 3 + [
        "generic"
    ] * 3
    assert all(isinstance(b.GetLearner(), TcnLearner) for b in model.GetBlocks())

    ids = [p.id for p in model.GetParameters()]
    assert len(ids) == len(set(ids))
    assert ids[0].startswith("stack0.trend.block0.")

    again = BuildModel(config)
    for a, b in zip(model.GetParameters(), again.GetParameters()):
        assert numpy.array_equal(a.value, b.value)
    other = BuildModel(attr.evolve(config, seed=1))
    assert not numpy.array_equal(model.GetParameters()[0].value, other.GetParameters()[0].value)


def testZeroTrendBlock() -> None:
    model = BuildModel(_SmallConfig(stacks=["trend"], blocks_per_stack=1))
    _ZeroParameters(model)
    x = Tensor(numpy.random.default_rng(0).normal(size=(2, 3, 12)))
    result = ModelForward(x, model)
    assert result.total.shape == (2, 3, 4)
    assert not result.total.data.any()
    assert numpy.array_equal(result.residual.data, x.data)


def testSecondBlockSeesZeroResidual(mocker) -> None:
    model = BuildModel(_SmallConfig(stacks=["generic"], blocks_per_stack=2))
    first, second = model.GetBlocks()
    x = Tensor(numpy.random.default_rng(1).normal(size=(2, 3, 12)))
    mocker.patch.object(first, "Forward", return_value=(x, Tensor(numpy.zeros((2, 3, 4)))))
    spy = mocker.spy(second, "Forward")

    ModelForward(x, model)
    assert spy.call_count == 1
    received = spy.call_args[0][0]
    assert received.shape == (2, 3, 12)
    assert not received.data.any()


def testDecompositionIsExact() -> None:
    rng = numpy.random.default_rng(2)
    for seed in range(10):
        model = BuildModel(_SmallConfig(seed=seed, stacks=["trend", "seasonality", "generic"]))
        for _ in range(10):
            x = Tensor(rng.normal(size=(4, 3, 12)))
            result = DecomposeForecast(x, model)
            assert result.GetKinds() == ["trend", "seasonality", "generic"]
            summed = result.per_stack["trend"].data + result.per_stack["seasonality"].data
            summed = summed + result.per_stack["generic"].data
            assert numpy.array_equal(summed, result.total.data)


def testResidualsTelescope() -> None:
    rng = numpy.random.default_rng(3)
    model = BuildModel(_SmallConfig())
    x = Tensor(rng.normal(size=(2, 3, 12)))

    residual = x
    backcast_sum = numpy.zeros(x.shape)
    for block in model.GetBlocks():
        backcast, _ = block.Forward(residual)
        residual = Subtract(residual, backcast)
        backcast_sum += backcast.data

    result = ModelForward(x, model)
    assert numpy.array_equal(result.residual.data, residual.data)
    assert numpy.abs(result.residual.data + backcast_sum - x.data).max() < 1e-10


def testUnbatchedInput() -> None:
    rng = numpy.random.default_rng(4)
    model = BuildModel(_SmallConfig())
    window = rng.normal(size=(3, 12))

    single = ModelForward(Tensor(window), model)
    batched = ModelForward(Tensor(window[None]), model)
    assert single.total.shape == (3, 4)
    assert single.residual.shape == (3, 12)
    assert numpy.array_equal(single.total.data, batched.total.data[0])
    assert numpy.array_equal(single.per_stack["trend"].data, batched.per_stack["trend"].data[0])


def testHorizonIndependentOfLookback() -> None:
    rng = numpy.random.default_rng(5)
    for lookback in (5, 12, 30):
        model = BuildModel(_SmallConfig(lookback=lookback, horizon=7))
        result = ModelForward(Tensor(rng.normal(size=(2, 3, lookback))), model)
        assert result.total.shape == (2, 3, 7)


def testModelForwardShapeErrors() -> None:
    model = BuildModel(_SmallConfig())
    with pytest.raises(DimensionError):
        ModelForward(Tensor(numpy.zeros((2, 4, 12))), model)
    with pytest.raises(DimensionError):
        ModelForward(Tensor(numpy.zeros((2, 3, 11))), model)
    with pytest.raises(DimensionError):
        ModelForward(Tensor(numpy.zeros(12)), model)


def testDecomposeTrendOnly() -> None:
    model = BuildModel(_SmallConfig(stacks=["trend"]))
    result = DecomposeForecast(Tensor(numpy.random.default_rng(6).normal(size=(2, 3, 12))), model)
    assert result.GetKinds() == ["trend"]
    assert not result.GetComponent("seasonality").any()
    assert result.GetComponent("seasonality").shape == (2, 3, 4)
    assert numpy.array_equal(result.total.data, result.GetComponent("trend"))


def testZeroParameterModel() -> None:
    model = BuildModel(_SmallConfig(stacks=["trend", "seasonality", "generic"]))
    _ZeroParameters(model)
    result = DecomposeForecast(Tensor(numpy.random.default_rng(7).normal(size=(2, 3, 12))), model)
    assert not result.total.data.any()
    for kind in ("trend", "seasonality", "generic"):
        assert not result.GetComponent(kind).any()


def testCheckCompatible() -> None:
    model = BuildModel(_SmallConfig())
    model.CheckCompatible(3, 12, 4)
    with pytest.raises(CompatibilityError, match="variable count M is 3 but data has 5"):
        model.CheckCompatible(5, 12, 4)
    with pytest.raises(CompatibilityError, match="lookback"):
        model.CheckCompatible(3, 10, 4)
    with pytest.raises(CompatibilityError, match="horizon"):
        model.CheckCompatible(3, 12, 6)


def testParameterValues() -> None:
    model = BuildModel(_SmallConfig())
    values = model.GetParameterValues()
    _ZeroParameters(model)
    assert not any(p.value.any() for p in model.GetParameters())
    model.SetParameterValues(values)
    for param in model.GetParameters():
        assert numpy.array_equal(param.value, values[param.id])


def _Loss(model, x: Tensor, y: Tensor):
    diff = Subtract(model.Forward(x).total, y)
    return Mean(Multiply(diff, diff))


def testFullModelGradients() -> None:
    rng = numpy.random.default_rng(8)
    config = ModelConfig(
        variables=3,
        lookback=20,
        horizon=5,
        stacks=["trend", "seasonality"],
        blocks_per_stack=2,
        fourier_order=4,
        tcn_hidden_channels=4,
        tcn_kernel_size=2,
        tcn_dilations=(1, 2),
        seed=3,
    )
    model = BuildModel(config)
    x = Tensor(rng.normal(size=(2, 3, 20)))
    y = Tensor(rng.normal(size=(2, 3, 5)))

    result = GradCheckDetailed(lambda: _Loss(model, x, y), model.GetParameters())
    assert result.checked > 0
    assert result.max_relative_error < 1e-4


@pytest.mark.slow
def testDefaultModelGradients() -> None:
    rng = numpy.random.default_rng(10)
    model = BuildModel(ModelConfig(variables=3, lookback=20, horizon=5))
    assert model.config.tcn_hidden_channels == 32
    x = Tensor(rng.normal(size=(2, 3, 20)))
    y = Tensor(rng.normal(size=(2, 3, 5)))

    result = GradCheckDetailed(lambda: _Loss(model, x, y), model.GetParameters())
    assert result.checked > 0
    assert result.max_relative_error < 1e-4


def testFcLearnerGradients() -> None:
    rng = numpy.random.default_rng(9)
    config = ModelConfig(
        variables=2,
        lookback=6,
        horizon=3,
        fourier_order=4,
        learner="fc",
        fc_layers=2,
        fc_units=8,
        seed=4,
    )
    model = BuildModel(config)
    assert "fc0" in model.GetParameters()[0].id
    assert all(isinstance(b.GetLearner(), FcLearner) for b in model.GetBlocks())
    x = Tensor(rng.normal(size=(3, 2, 6)))
    y = Tensor(rng.normal(size=(3, 2, 3)))

    result = GradCheckDetailed(lambda: _Loss(model, x, y), model.GetParameters())
    assert result.checked > 0
    assert result.max_relative_error < 1e-4
