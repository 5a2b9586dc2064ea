from typing import Any
from typing import List

import numpy
import pytest

from nftcast.data import MakeWindows
from nftcast.data import RawSeries
from nftcast.data import SplitProtocol1
from nftcast.data import WindowedDataset
from nftcast.model import ModelConfig


def pytest_addoption(parser: Any) -> None:
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run long end-to-end learning checks",
    )


def pytest_configure(config: Any) -> None:
    config.addinivalue_line("markers", "slow: long end-to-end check, needs --run-slow")


def pytest_collection_modifyitems(config: Any, items: List[Any]) -> None:
    if config.getoption("--run-slow", default=False):
        return
    skip = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def CreateSmallModelConfig(**kwargs: Any) -> ModelConfig:
    """
    :returns:
        A model over 2 variables, lookback 8 and horizon 3 that evaluates in a few milliseconds.
    """
    values = dict(
        variables=2,
        lookback=8,
        horizon=3,
        fourier_order=4,
        tcn_hidden_channels=4,
        tcn_kernel_size=2,
        tcn_dilations=(1, 2),
    )
    values.update(kwargs)
    return ModelConfig(**values)


def CreateSineDataset(length: int = 120, seed: int = 0) -> WindowedDataset:
    """
    :returns:
        Two noisy sinusoids, windowed for lookback 8 and horizon 3 and split 70/10/20 in time.
    """
    rng = numpy.random.default_rng(seed)
    s = numpy.arange(length)
    values = numpy.vstack(
        [numpy.sin(2 * numpy.pi * s / 12), numpy.cos(2 * numpy.pi * s / 20)]
    ) + rng.normal(scale=0.1, size=(2, length))
    series = RawSeries("sine", ["a", "b"], values)
    return SplitProtocol1(MakeWindows([series], 8, 3), (0.7, 0.1, 0.2))


@pytest.fixture
def small_model_config() -> ModelConfig:
    return CreateSmallModelConfig()


@pytest.fixture
def sine_dataset() -> WindowedDataset:
    return CreateSineDataset()
