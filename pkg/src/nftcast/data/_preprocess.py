"""
Preprocessing, always applied in this order with statistics taken from the training region only:

    IQR outlier masking -> mean imputation -> standardization
"""

import logging
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import attr
import numpy

from nftcast.exceptions import DimensionError
from nftcast.exceptions import DomainError
from nftcast.exceptions import ImputationError

from ._series import RawSeries

__all__ = [
    "ComputeStats",
    "Destandardize",
    "IQR_MULTIPLIER",
    "ImputeMean",
    "PreprocessSeries",
    "PreprocessStats",
    "RemoveOutliersIqr",
    "STD_FLOOR",
    "Standardize",
    "TrainRegion",
]

logger = logging.getLogger(__name__)

IQR_MULTIPLIER = 1.5
STD_FLOOR = 1e-8

# Number of leading time steps of a series that belong to the training region; None excludes
# the series from the statistics.
TrainRegion = Optional[int]


def _FloatArray(value: Sequence[float]) -> numpy.ndarray:
    result = numpy.array(value, dtype=numpy.float64)
    result.flags.writeable = False
    return result


@attr.s(auto_attribs=True, frozen=True, eq=False)
class PreprocessStats:
    """
    Per-variable statistics of the training region (observed entries only). Population standard
    deviation; quantiles interpolate linearly between order statistics.

    A variable without any observed training value has NaN statistics.
    """

    mean: numpy.ndarray = attr.ib(converter=_FloatArray)
    std: numpy.ndarray = attr.ib(converter=_FloatArray)
    q1: numpy.ndarray = attr.ib(converter=_FloatArray)
    q3: numpy.ndarray = attr.ib(converter=_FloatArray)

    def __attrs_post_init__(self) -> None:
        shapes = [a.shape for a in (self.mean, self.std, self.q1, self.q3)]
        if len(set(shapes)) != 1 or len(shapes[0]) != 1:
            raise DimensionError("PreprocessStats", *shapes)

    def GetVariables(self) -> int:
        return self.mean.shape[0]

    variables = property(GetVariables)

    def GetIqrBounds(self) -> Tuple[numpy.ndarray, numpy.ndarray]:
        """
        :returns:
            (low, high) = (q1 − 1.5·IQR, q3 + 1.5·IQR) per variable.
        """
        iqr = self.q3 - self.q1
        return self.q1 - IQR_MULTIPLIER * iqr, self.q3 + IQR_MULTIPLIER * iqr

    def GetScale(self) -> numpy.ndarray:
        """
        :returns:
            The divisor used by standardization, max(std, 1e-8).
        """
        return numpy.maximum(self.std, STD_FLOOR)

    def ToDict(self) -> dict:
        return {name: getattr(self, name).tolist() for name in ("mean", "std", "q1", "q3")}

    @classmethod
    def FromDict(cls, contents: dict) -> "PreprocessStats":
        return cls(contents["mean"], contents["std"], contents["q1"], contents["q3"])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PreprocessStats):
            return NotImplemented
        return all(
            numpy.array_equal(getattr(self, name), getattr(other, name), equal_nan=True)
            for name in ("mean", "std", "q1", "q3")
        )


def ComputeStats(
    series_list: Sequence[RawSeries], regions: Optional[Sequence[TrainRegion]] = None
) -> PreprocessStats:
    """
    :param regions:
        One entry per series: the length of its training prefix, or None to leave the series
        out. Defaults to the whole of every series.
    """
    if not series_list:
        raise DomainError("No series to compute statistics from")
    if regions is None:
        regions = [s.length for s in series_list]
    if len(regions) != len(series_list):
        raise DimensionError("ComputeStats", (len(series_list),), (len(regions),))

    variables = series_list[0].variables
    pooled: List[List[numpy.ndarray]] = [[] for _ in range(variables)]
    for series, region in zip(series_list, regions):
        if series.variables != variables:
            raise DimensionError("ComputeStats", series.values.shape, (variables,))
        if region is None:
            continue
        for i in range(variables):
            row = series.values[i, :region]
            pooled[i].append(row[~series.mask[i, :region]])

    mean, std, q1, q3 = (numpy.full(variables, numpy.nan) for _ in range(4))
    for i, chunks in enumerate(pooled):
        observed = numpy.concatenate(chunks) if chunks else numpy.empty(0)
        if observed.size == 0:
            continue
        mean[i] = observed.mean()
        std[i] = observed.std()
        q1[i], q3[i] = numpy.quantile(observed, [0.25, 0.75])
    return PreprocessStats(mean, std, q1, q3)


def _CheckVariables(operation: str, series: RawSeries, stats: PreprocessStats) -> None:
    if series.variables != stats.variables:
        raise DimensionError(operation, series.values.shape, (stats.variables,))


def RemoveOutliersIqr(series: RawSeries, stats: PreprocessStats) -> RawSeries:
    """
    Marks as missing every entry outside [q1 − 1.5·IQR, q3 + 1.5·IQR]. Entries already missing
    stay missing.
    """
    _CheckVariables("RemoveOutliersIqr", series, stats)
    low, high = stats.GetIqrBounds()
    values = series.values
    with numpy.errstate(invalid="ignore"):
        outside = (values < low[:, None]) | (values > high[:, None])
    if outside.any():
        logger.debug("Series %s: %d outliers masked", series.id, int(outside.sum()))
    return series.WithValues(values, series.mask | outside)


def ImputeMean(series: RawSeries, stats: PreprocessStats) -> RawSeries:
    """
    Replaces every missing entry by the training mean of its variable.

    :raises ImputationError:
        If a variable with missing entries has no training mean.
    """
    _CheckVariables("ImputeMean", series, stats)
    if not series.HasMissing():
        return series
    for i, name in enumerate(series.names):
        if series.mask[i].any() and not numpy.isfinite(stats.mean[i]):
            raise ImputationError(name)
    values = numpy.where(series.mask, stats.mean[:, None], series.values)
    return series.WithValues(values, numpy.zeros_like(series.mask))


def Standardize(series: RawSeries, stats: PreprocessStats) -> RawSeries:
    """
    (v − mean) / max(std, 1e-8), per variable.

    :raises DomainError:
        If the series still has missing entries.
    """
    _CheckVariables("Standardize", series, stats)
    if series.HasMissing():
        raise DomainError(f"Series {series.id} must be imputed before standardization")
    values = (series.values - stats.mean[:, None]) / stats.GetScale()[:, None]
    return series.WithValues(values)


def Destandardize(values: numpy.ndarray, stats: PreprocessStats) -> numpy.ndarray:
    """
    Maps standardized values back to raw scale.

    :param values:
        [..., M, L] with the variables on the second-to-last axis.
    """
    values = numpy.asarray(values, dtype=numpy.float64)
    if values.ndim < 2 or values.shape[-2] != stats.variables:
        raise DimensionError("Destandardize", values.shape, (stats.variables,))
    return values * stats.GetScale()[:, None] + stats.mean[:, None]


def PreprocessSeries(
    series_list: Sequence[RawSeries], regions: Sequence[TrainRegion]
) -> Tuple[List[RawSeries], PreprocessStats]:
    """
    Runs the whole pipeline, recomputing the training statistics after every stage.

    :returns:
        The standardized series and the statistics used to standardize them.
    """
    stats = ComputeStats(series_list, regions)
    cleaned = [RemoveOutliersIqr(s, stats) for s in series_list]

    stats = ComputeStats(cleaned, regions)
    imputed = [ImputeMean(s, stats) for s in cleaned]

    stats = ComputeStats(imputed, regions)
    standardized = [Standardize(s, stats) for s in imputed]
    return standardized, stats
