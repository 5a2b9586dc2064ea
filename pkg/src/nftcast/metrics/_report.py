"""
Metrics reports and their comparison.

A report file is a block of ``key = value`` lines, a blank line, then a per-horizon table::

    # nftcast metrics report
    method = nft
    split = test
    windows = 14
    aggregate_mse = 0.0123
    aggregate_raw_mse = 1.87

    horizon,mse,raw_mse
    1,0.0101,1.52
    ...

``aggregate_raw_mse`` and the ``raw_mse`` column are present only for reports with raw-scale
values. A comparison file has the same layout, with keys ``model``, ``baseline``,
``mean_improvement_percent``, ``pearson_r``, ``t_statistic``, ``p_value`` (``undefined`` when a
statistic cannot be computed), one ``notice`` line per degenerate statistic, and the columns
``horizon,model_mse,baseline_mse,improvement_percent``.

A horizon sweep file compares models trained for several forecast lengths H, one aggregate MSE
each, against the best baseline at every length: keys ``model``, ``mean_improvement_percent``,
``pearson_r`` (between H and improvement), ``t_statistic``, ``p_value`` and ``notice`` lines,
then the columns ``forecast_length,model_mse,baseline,baseline_mse,improvement_percent``.
"""

import logging
from pathlib import Path
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import attr
import numpy

from nftcast.basic.format_float import FloatFromString
from nftcast.basic.format_float import FormatFloat
from nftcast.exceptions import ComparisonError
from nftcast.exceptions import DegenerateInputError
from nftcast.exceptions import DimensionError
from nftcast.exceptions import ParseError

from ._stats import ImprovementPercent
from ._stats import PairedTTest
from ._stats import PearsonCorrelation
from ._stats import TTestResult

__all__ = [
    "Comparison",
    "CompareHorizonSweep",
    "CompareReports",
    "GetForecastLength",
    "HorizonSweep",
    "LoadReport",
    "MetricsReport",
    "WriteComparison",
    "WriteHorizonSweep",
    "WriteReport",
]

logger = logging.getLogger(__name__)

REPORT_TITLE = "# nftcast metrics report"
COMPARISON_TITLE = "# nftcast comparison"
SWEEP_TITLE = "# nftcast horizon sweep"
UNDEFINED = "undefined"

PathLike = Union[str, Path]


def _FloatTuple(values: Sequence[float]) -> Tuple[float, ...]:
    return tuple(float(v) for v in values)


def _OptionalFloatTuple(values: Optional[Sequence[float]]) -> Optional[Tuple[float, ...]]:
    return None if values is None else _FloatTuple(values)


@attr.s(auto_attribs=True, frozen=True)
class MetricsReport:
    """
    Per-horizon test errors of one method.

    :ivar horizons:
        Forecast steps (1-based) the errors refer to.

    :ivar mse:
        Standardized-scale MSE at each horizon.

    :ivar raw_mse:
        Raw-scale MSE at each horizon, when known.

    :ivar aggregate_mse:
        Mean MSE over every window of the split; the mean of `mse` when not given.
    """

    method: str
    horizons: Tuple[int, ...] = attr.ib(converter=lambda v: tuple(int(h) for h in v))
    mse: Tuple[float, ...] = attr.ib(converter=_FloatTuple)
    raw_mse: Optional[Tuple[float, ...]] = attr.ib(default=None, converter=_OptionalFloatTuple)
    split: str = "test"
    windows: int = 0
    aggregate_mse: Optional[float] = None
    aggregate_raw_mse: Optional[float] = None

    def __attrs_post_init__(self) -> None:
        shapes = [(len(self.horizons),), (len(self.mse),)]
        if self.raw_mse is not None:
            shapes.append((len(self.raw_mse),))
        if len(set(shapes)) != 1 or not self.horizons:
            raise DimensionError("MetricsReport", *shapes)
        if self.aggregate_mse is None:
            object.__setattr__(self, "aggregate_mse", float(numpy.mean(self.mse)))
        if self.aggregate_raw_mse is None and self.raw_mse is not None:
            object.__setattr__(self, "aggregate_raw_mse", float(numpy.mean(self.raw_mse)))


def WriteReport(report: MetricsReport, path: PathLike) -> None:
    assert report.aggregate_mse is not None
    lines = [
        REPORT_TITLE,
        f"method = {report.method}",
        f"split = {report.split}",
        f"windows = {report.windows}",
        f"aggregate_mse = {FormatFloat(report.aggregate_mse)}",
    ]
    if report.aggregate_raw_mse is not None:
        lines.append(f"aggregate_raw_mse = {FormatFloat(report.aggregate_raw_mse)}")
    lines.append("")

    if report.raw_mse is None:
        lines.append("horizon,mse")
        lines += [f"{h},{FormatFloat(m)}" for h, m in zip(report.horizons, report.mse)]
    else:
        lines.append("horizon,mse,raw_mse")
        lines += [
            f"{h},{FormatFloat(m)},{FormatFloat(r)}"
            for h, m, r in zip(report.horizons, report.mse, report.raw_mse)
        ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _ReadSections(path: PathLike, title: str) -> Tuple[Dict[str, str], List[str], int]:
    """
    :returns:
        (key-value pairs, table lines, line number of the table header).
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != title:
        raise ParseError(path, f"expected {title!r}", line=1)
    values: Dict[str, str] = {}
    index = 1
    while index < len(lines) and lines[index].strip():
        key, sep, value = lines[index].partition("=")
        if not sep:
            raise ParseError(path, f"expected 'key = value', got {lines[index]!r}", index + 1)
        values[key.strip()] = value.strip()
        index += 1
    table = [line for line in lines[index + 1 :] if line.strip()]
    return values, table, index + 2


def LoadReport(path: PathLike) -> MetricsReport:
    """
    :raises ParseError:
        If the file is not a metrics report written by `WriteReport`.
    """
    values, table, header_line = _ReadSections(path, REPORT_TITLE)
    for key in ("method", "split", "windows", "aggregate_mse"):
        if key not in values:
            raise ParseError(path, f"missing key {key!r}")
    if not table or table[0] not in ("horizon,mse", "horizon,mse,raw_mse"):
        raise ParseError(path, "missing per-horizon table", header_line)
    has_raw = table[0].endswith("raw_mse")

    horizons: List[int] = []
    mse: List[float] = []
    raw_mse: List[float] = []
    for offset, row in enumerate(table[1:], start=1):
        cells = row.split(",")
        try:
            if len(cells) != (3 if has_raw else 2):
                raise ValueError(row)
            horizons.append(int(cells[0]))
            mse.append(FloatFromString(cells[1]))
            if has_raw:
                raw_mse.append(FloatFromString(cells[2]))
        except ValueError:
            raise ParseError(path, f"malformed row {row!r}", header_line + offset)

    try:
        aggregate_raw = values.get("aggregate_raw_mse")
        return MetricsReport(
            method=values["method"],
            horizons=horizons,
            mse=mse,
            raw_mse=raw_mse if has_raw else None,
            split=values["split"],
            windows=int(values["windows"]),
            aggregate_mse=FloatFromString(values["aggregate_mse"]),
            aggregate_raw_mse=None if aggregate_raw is None else FloatFromString(aggregate_raw),
        )
    except (ValueError, DimensionError) as e:
        raise ParseError(path, f"invalid report: {e}")


@attr.s(auto_attribs=True, frozen=True)
class Comparison:
    """
    A model report against a baseline report over the same horizons.

    :ivar improvements:
        Improvement percentage at each horizon, None where the baseline MSE is not positive.

    :ivar mean_improvement:
        Mean of the defined improvements.

    :ivar correlation:
        Pearson r between horizon and improvement.

    :ivar t_test:
        Paired t-test of model against baseline per-horizon MSE.

    :ivar notices:
        One line for every statistic that could not be computed.
    """

    model: str
    baseline: str
    horizons: Tuple[int, ...]
    model_mse: Tuple[float, ...]
    baseline_mse: Tuple[float, ...]
    improvements: Tuple[Optional[float], ...]
    mean_improvement: Optional[float]
    correlation: Optional[float]
    t_test: Optional[TTestResult]
    notices: Tuple[str, ...] = ()


def CompareReports(model: MetricsReport, baseline: MetricsReport) -> Comparison:
    """
    :raises ComparisonError:
        If the reports do not cover the same horizons.
    """
    if model.horizons != baseline.horizons:
        raise ComparisonError(
            f"Reports cover different horizons: {list(model.horizons)}"
            f" and {list(baseline.horizons)}"
        )

    notices: List[str] = []
    improvements: List[Optional[float]] = []
    for h, m, b in zip(model.horizons, model.mse, baseline.mse):
        if b > 0:
            improvements.append(ImprovementPercent(m, b))
        else:
            improvements.append(None)
            notices.append(f"improvement undefined at horizon {h}: baseline MSE is {b}")

    defined = [(h, i) for h, i in zip(model.horizons, improvements) if i is not None]
    mean_improvement = float(numpy.mean([i for _, i in defined])) if defined else None

    correlation = None
    try:
        correlation = PearsonCorrelation([h for h, _ in defined], [i for _, i in defined])
    except DegenerateInputError as e:
        notices.append(f"correlation undefined: {e}")

    t_test = None
    try:
        t_test = PairedTTest(model.mse, baseline.mse)
    except DegenerateInputError as e:
        notices.append(f"t-test undefined: {e}")

    for notice in notices:
        logger.warning(notice)
    return Comparison(
        model=model.method,
        baseline=baseline.method,
        horizons=model.horizons,
        model_mse=model.mse,
        baseline_mse=baseline.mse,
        improvements=tuple(improvements),
        mean_improvement=mean_improvement,
        correlation=correlation,
        t_test=t_test,
        notices=tuple(notices),
    )


def _FormatOptional(value: Optional[float]) -> str:
    return UNDEFINED if value is None else FormatFloat(value)


def WriteComparison(comparison: Comparison, path: PathLike) -> None:
    t_test = comparison.t_test
    lines = [
        COMPARISON_TITLE,
        f"model = {comparison.model}",
        f"baseline = {comparison.baseline}",
        f"mean_improvement_percent = {_FormatOptional(comparison.mean_improvement)}",
        f"pearson_r = {_FormatOptional(comparison.correlation)}",
        f"t_statistic = {_FormatOptional(None if t_test is None else t_test.t_statistic)}",
        f"p_value = {_FormatOptional(None if t_test is None else t_test.p_value)}",
    ]
    lines += [f"notice = {notice}" for notice in comparison.notices]
    lines += ["", "horizon,model_mse,baseline_mse,improvement_percent"]
    for h, m, b, i in zip(
        comparison.horizons,
        comparison.model_mse,
        comparison.baseline_mse,
        comparison.improvements,
    ):
        lines.append(f"{h},{FormatFloat(m)},{FormatFloat(b)},{_FormatOptional(i)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@attr.s(auto_attribs=True, frozen=True)
class HorizonSweep:
    """
    Models trained for different forecast lengths H against the best baseline at each length.

    :ivar forecast_lengths:
        The H of every model report, increasing.

    :ivar model_mse:
        Aggregate MSE of the model at each forecast length.

    :ivar baselines:
        Method of the best baseline (lowest aggregate MSE) at each forecast length.

    :ivar baseline_mse:
        Aggregate MSE of that baseline.

    :ivar improvements:
        Improvement percentage at each forecast length, None where the baseline MSE is not
        positive.

    :ivar mean_improvement:
        Mean of the defined improvements.

    :ivar correlation:
        Pearson r between forecast length and improvement.

    :ivar t_test:
        Paired t-test of model against baseline aggregate MSE.
    """

    model: str
    forecast_lengths: Tuple[int, ...]
    model_mse: Tuple[float, ...]
    baselines: Tuple[str, ...]
    baseline_mse: Tuple[float, ...]
    improvements: Tuple[Optional[float], ...]
    mean_improvement: Optional[float]
    correlation: Optional[float]
    t_test: Optional[TTestResult]
    notices: Tuple[str, ...] = ()


def GetForecastLength(report: MetricsReport) -> int:
    """
    :returns:
        The horizon H the reported model forecasts, its last reported step.
    """
    return max(report.horizons)


def CompareHorizonSweep(
    models: Sequence[MetricsReport], baselines: Sequence[MetricsReport]
) -> HorizonSweep:
    """
    Matches every model report with the baseline reports of the same forecast length and keeps
    the one with the lowest aggregate MSE. Baselines at lengths without a model are ignored.

    :raises ComparisonError:
        If there is no model report, two model reports share a forecast length, the model
        reports name different methods, or some model forecast length has no baseline.
    """
    if not models:
        raise ComparisonError("No model report to compare")
    methods = sorted({m.method for m in models})
    if len(methods) != 1:
        raise ComparisonError(f"Model reports name different methods: {methods}")

    by_length: Dict[int, MetricsReport] = {}
    for report in models:
        length = GetForecastLength(report)
        if length in by_length:
            raise ComparisonError(f"Two model reports have forecast length {length}")
        by_length[length] = report

    best: Dict[int, MetricsReport] = {}
    for report in baselines:
        length = GetForecastLength(report)
        if length not in by_length:
            logger.info("Ignoring %s baseline at forecast length %d", report.method, length)
            continue
        current = best.get(length)
        if current is None or _Aggregate(report) < _Aggregate(current):
            best[length] = report
    missing = sorted(set(by_length) - set(best))
    if missing:
        raise ComparisonError(f"No baseline report for forecast lengths {missing}")

    lengths = sorted(by_length)
    model_mse = [_Aggregate(by_length[h]) for h in lengths]
    baseline_mse = [_Aggregate(best[h]) for h in lengths]

    notices: List[str] = []
    improvements: List[Optional[float]] = []
    for h, m, b in zip(lengths, model_mse, baseline_mse):
        if b > 0:
            improvements.append(ImprovementPercent(m, b))
        else:
            improvements.append(None)
            notices.append(f"improvement undefined at forecast length {h}: baseline MSE is {b}")

    defined = [(h, i) for h, i in zip(lengths, improvements) if i is not None]
    mean_improvement = float(numpy.mean([i for _, i in defined])) if defined else None

    correlation = None
    try:
        correlation = PearsonCorrelation([h for h, _ in defined], [i for _, i in defined])
    except DegenerateInputError as e:
        notices.append(f"correlation undefined: {e}")

    t_test = None
    try:
        t_test = PairedTTest(model_mse, baseline_mse)
    except DegenerateInputError as e:
        notices.append(f"t-test undefined: {e}")

    for notice in notices:
        logger.warning(notice)
    return HorizonSweep(
        model=methods[0],
        forecast_lengths=tuple(lengths),
        model_mse=tuple(model_mse),
        baselines=tuple(best[h].method for h in lengths),
        baseline_mse=tuple(baseline_mse),
        improvements=tuple(improvements),
        mean_improvement=mean_improvement,
        correlation=correlation,
        t_test=t_test,
        notices=tuple(notices),
    )


def _Aggregate(report: MetricsReport) -> float:
    assert report.aggregate_mse is not None
    return report.aggregate_mse


def WriteHorizonSweep(sweep: HorizonSweep, path: PathLike) -> None:
    t_test = sweep.t_test
    lines = [
        SWEEP_TITLE,
        f"model = {sweep.model}",
        f"mean_improvement_percent = {_FormatOptional(sweep.mean_improvement)}",
        f"pearson_r = {_FormatOptional(sweep.correlation)}",
        f"t_statistic = {_FormatOptional(None if t_test is None else t_test.t_statistic)}",
        f"p_value = {_FormatOptional(None if t_test is None else t_test.p_value)}",
    ]
    lines += [f"notice = {notice}" for notice in sweep.notices]
    lines += ["", "forecast_length,model_mse,baseline,baseline_mse,improvement_percent"]
    for h, m, name, b, i in zip(
        sweep.forecast_lengths,
        sweep.model_mse,
        sweep.baselines,
        sweep.baseline_mse,
        sweep.improvements,
    ):
        lines.append(f"{h},{FormatFloat(m)},{name},{FormatFloat(b)},{_FormatOptional(i)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
