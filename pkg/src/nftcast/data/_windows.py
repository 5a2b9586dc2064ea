"""
Sliding windows over preprocessed series and their assignment to train/val/test splits.

Protocol 1 splits every series along time (the model forecasts the future of the series it was
trained on). Protocol 2 splits whole series (the model is evaluated on unseen series).
"""

import logging
import math
from typing import Dict
from typing import Iterator
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import attr
import numpy
from typing_extensions import Literal

from nftcast.exceptions import ConfigurationError
from nftcast.exceptions import EmptyDatasetError

from ._preprocess import PreprocessSeries
from ._preprocess import PreprocessStats
from ._preprocess import TrainRegion
from ._series import RawSeries

__all__ = [
    "AssignSeriesProtocol2",
    "BuildDataset",
    "MakeWindows",
    "Protocol1Boundaries",
    "SPLITS",
    "Split",
    "SplitProtocol1",
    "SplitProtocol2",
    "SplitSpec",
    "Window",
    "WindowedDataset",
]

logger = logging.getLogger(__name__)

Split = Literal["train", "val", "test"]
SPLITS: Tuple[Split, ...] = ("train", "val", "test")

# Absorbs representation error of ratio sums (0.7 + 0.1 is 0.7999999999999999).
_RATIO_EPSILON = 1e-9


def _ValidRatios(instance: object, attribute: object, value: Tuple[float, ...]) -> None:
    if len(value) != 3:
        raise ConfigurationError(f"Expected 3 split ratios (train, val, test), got {list(value)}")
    if any(not 0.0 < r < 1.0 for r in value):
        raise ConfigurationError(f"Split ratios must lie in (0, 1), got {list(value)}")
    if abs(sum(value) - 1.0) > 1e-6:
        raise ConfigurationError(f"Split ratios must sum to 1, got {list(value)}")


def _ValidProtocol(instance: object, attribute: object, value: int) -> None:
    if value not in (1, 2):
        raise ConfigurationError(f"Protocol must be 1 or 2, got {value}")


@attr.s(auto_attribs=True, frozen=True)
class SplitSpec:

    protocol: int = attr.ib(default=1, validator=_ValidProtocol)
    ratios: Tuple[float, float, float] = attr.ib(
        default=(0.7, 0.1, 0.2),
        converter=lambda v: tuple(float(x) for x in v),
        validator=_ValidRatios,
    )


@attr.s(auto_attribs=True, frozen=True)
class Window:
    """
    :ivar series:
        Index of the source series in the dataset.

    :ivar start:
        First time step of X; Y starts at start + lookback.
    """

    series: int
    start: int
    split: Optional[Split] = None


@attr.s(auto_attribs=True, frozen=True, eq=False)
class WindowedDataset:
    """
    Preprocessed series together with the windows cut from them.

    :ivar stats:
        Statistics used to standardize `series` (None when the series were not preprocessed).
    """

    series: Tuple[RawSeries, ...] = attr.ib(converter=tuple)
    windows: Tuple[Window, ...] = attr.ib(converter=tuple)
    lookback: int
    horizon: int
    stats: Optional[PreprocessStats] = None

    def GetVariables(self) -> int:
        return self.series[0].variables

    variables = property(GetVariables)

    def GetNames(self) -> Tuple[str, ...]:
        return self.series[0].names

    def GetWindows(self, split: Optional[Split] = None) -> List[Window]:
        """
        :param split:
            Only windows of this split; None for all windows, in order.
        """
        if split is None:
            return list(self.windows)
        return [w for w in self.windows if w.split == split]

    def GetSeriesIds(self, split: Split) -> List[str]:
        ids = {self.series[w.series].id for w in self.windows if w.split == split}
        return sorted(ids)

    def GetInput(self, window: Window) -> numpy.ndarray:
        """
        :returns:
            X, [M × lookback].
        """
        values = self.series[window.series].values
        return values[:, window.start : window.start + self.lookback]

    def GetTarget(self, window: Window) -> numpy.ndarray:
        """
        :returns:
            Y, [M × horizon].
        """
        values = self.series[window.series].values
        begin = window.start + self.lookback
        return values[:, begin : begin + self.horizon]

    def GetBatch(self, windows: Sequence[Window]) -> Tuple[numpy.ndarray, numpy.ndarray]:
        """
        :returns:
            (X [batch × M × lookback], Y [batch × M × horizon]).
        """
        x = numpy.stack([self.GetInput(w) for w in windows])
        y = numpy.stack([self.GetTarget(w) for w in windows])
        return x, y

    def IterBatches(
        self, windows: Sequence[Window], batch_size: int
    ) -> Iterator[Tuple[numpy.ndarray, numpy.ndarray]]:
        for begin in range(0, len(windows), batch_size):
            yield self.GetBatch(windows[begin : begin + batch_size])

    def WithWindows(self, windows: Sequence[Window]) -> "WindowedDataset":
        return attr.evolve(self, windows=windows)


def MakeWindows(
    series_list: Sequence[RawSeries],
    lookback: int,
    horizon: int,
    stride: int = 1,
    stats: Optional[PreprocessStats] = None,
) -> WindowedDataset:
    """
    Cuts windows starting at 0, stride, 2·stride, ... from every series. A series of length T
    gives floor((T − lookback − horizon) / stride) + 1 windows when T ≥ lookback + horizon,
    and none otherwise.

    :raises EmptyDatasetError:
        If no series is long enough for a single window.
    """
    for name, value in (("lookback", lookback), ("horizon", horizon), ("stride", stride)):
        if value < 1:
            raise ConfigurationError(f"{name} must be at least 1, got {value}")
    if not series_list:
        raise ConfigurationError("No series given")

    windows = []
    for index, series in enumerate(series_list):
        last_start = series.length - lookback - horizon
        windows += [Window(index, start) for start in range(0, last_start + 1, stride)]
    if not windows:
        raise EmptyDatasetError(lookback, horizon, [s.length for s in series_list])
    return WindowedDataset(series_list, windows, lookback, horizon, stats)


def _CheckNoEmptySplit(dataset: WindowedDataset, protocol: int) -> None:
    for split in SPLITS:
        if not dataset.GetWindows(split):
            raise ConfigurationError(
                f"Protocol {protocol}: the {split} split has no window"
                f" (lookback={dataset.lookback}, horizon={dataset.horizon})"
            )


def Protocol1Boundaries(length: int, ratios: Sequence[float]) -> Tuple[int, int]:
    """
    :returns:
        (b1, b2): the train region is [0, b1), validation [b1, b2) and test [b2, length), with
        b1 = floor(r_train·T) and b2 = floor((r_train + r_val)·T).
    """
    b1 = math.floor(ratios[0] * length + _RATIO_EPSILON)
    b2 = math.floor((ratios[0] + ratios[1]) * length + _RATIO_EPSILON)
    return b1, b2


def SplitProtocol1(dataset: WindowedDataset, ratios: Sequence[float]) -> WindowedDataset:
    """
    Partitions the time axis of every series by the ratios and assigns each window to the region
    containing its full extent (X and Y). Windows straddling a boundary are dropped.

    :raises ConfigurationError:
        If a split ends up without windows.
    """
    extent = dataset.lookback + dataset.horizon
    windows = []
    for window in dataset.windows:
        b1, b2 = Protocol1Boundaries(dataset.series[window.series].length, ratios)
        end = window.start + extent
        if end <= b1:
            split: Split = "train"
        elif window.start >= b1 and end <= b2:
            split = "val"
        elif window.start >= b2:
            split = "test"
        else:
            continue
        windows.append(attr.evolve(window, split=split))

    logger.debug("Protocol 1: %d of %d windows kept", len(windows), len(dataset.windows))
    result = dataset.WithWindows(windows)
    _CheckNoEmptySplit(result, 1)
    return result


def AssignSeriesProtocol2(
    series_ids: Sequence[str], ratios: Sequence[float], seed: int
) -> Dict[str, Split]:
    """
    Shuffles whole series with a seeded generator and assigns them to splits: the first
    floor(r_train·n) to train, the next floor(r_val·n) to validation, the rest to test.

    :raises ConfigurationError:
        If there are fewer series than splits or a split would get no series.
    """
    n = len(series_ids)
    if n < len(SPLITS):
        raise ConfigurationError(f"Protocol 2 needs at least 3 series, got {n}")
    if len(set(series_ids)) != n:
        raise ConfigurationError("Protocol 2 needs unique series ids")

    n_train = math.floor(ratios[0] * n + _RATIO_EPSILON)
    n_val = math.floor(ratios[1] * n + _RATIO_EPSILON)
    counts = (n_train, n_val, n - n_train - n_val)
    if min(counts) < 1:
        raise ConfigurationError(
            f"Protocol 2 with {n} series and ratios {list(ratios)} leaves a split empty"
        )

    order = numpy.random.default_rng(seed).permutation(n)
    result: Dict[str, Split] = {}
    for position, index in enumerate(order):
        if position < n_train:
            result[series_ids[index]] = "train"
        elif position < n_train + n_val:
            result[series_ids[index]] = "val"
        else:
            result[series_ids[index]] = "test"
    return result


def SplitProtocol2(
    dataset: WindowedDataset, ratios: Sequence[float], seed: int
) -> WindowedDataset:
    """
    Assigns every window the split of its whole series; no series contributes to more than one
    split.
    """
    assignment = AssignSeriesProtocol2([s.id for s in dataset.series], ratios, seed)
    windows = [
        attr.evolve(w, split=assignment[dataset.series[w.series].id]) for w in dataset.windows
    ]
    result = dataset.WithWindows(windows)
    _CheckNoEmptySplit(result, 2)
    return result


def BuildDataset(
    series_list: Sequence[RawSeries],
    lookback: int,
    horizon: int,
    stride: int,
    split_spec: SplitSpec,
    seed: int,
) -> WindowedDataset:
    """
    Full data pipeline: training regions from the split protocol, preprocessing with training
    statistics, windowing and split assignment.
    """
    regions: List[TrainRegion]
    if split_spec.protocol == 1:
        regions = [Protocol1Boundaries(s.length, split_spec.ratios)[0] for s in series_list]
        if not any(regions):
            raise ConfigurationError("Protocol 1 training region is empty")
    else:
        assignment = AssignSeriesProtocol2(
            [s.id for s in series_list], split_spec.ratios, seed
        )
        regions = [s.length if assignment[s.id] == "train" else None for s in series_list]

    processed, stats = PreprocessSeries(series_list, regions)
    dataset = MakeWindows(processed, lookback, horizon, stride, stats)
    if split_spec.protocol == 1:
        dataset = SplitProtocol1(dataset, split_spec.ratios)
    else:
        dataset = SplitProtocol2(dataset, split_spec.ratios, seed)

    logger.info(
        "Dataset: %d series, %d variables, windows train/val/test = %d/%d/%d",
        len(processed),
        dataset.variables,
        *(len(dataset.GetWindows(split)) for split in SPLITS),
    )
    return dataset
