"""
The command implementations behind ``nftcast <verb>``.

Every command takes its inputs explicitly and writes its outputs under ``out_dir``; given the
same inputs the files written are byte-identical.
"""

import logging
from pathlib import Path
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy
import pandas

from nftcast.data import BuildDataset
from nftcast.data import Destandardize
from nftcast.data import DrawSynthSpec
from nftcast.data import GenerateSeriesList
from nftcast.data import LoadCsv
from nftcast.data import LoadCsvDirectory
from nftcast.data import RawSeries
from nftcast.data import Split
from nftcast.data import SynthSpec
from nftcast.data import WindowedDataset
from nftcast.data import WriteCsv
from nftcast.data import WriteSynthSpec
from nftcast.exceptions import CompatibilityError
from nftcast.exceptions import ConfigurationError
from nftcast.metrics import Comparison
from nftcast.metrics import CompareHorizonSweep
from nftcast.metrics import CompareReports
from nftcast.metrics import HorizonSweep
from nftcast.metrics import LoadReport
from nftcast.metrics import MetricsReport
from nftcast.metrics import WriteComparison
from nftcast.metrics import WriteHorizonSweep
from nftcast.metrics import WriteReport
from nftcast.model import BLOCK_KINDS
from nftcast.model import BuildModel
from nftcast.model import Checkpoint
from nftcast.model import DecomposeForecast
from nftcast.model import LoadCheckpoint
from nftcast.model import NFTModel
from nftcast.model import SaveCheckpoint
from nftcast.tensor import Tensor
from nftcast.training import Evaluate
from nftcast.training import Predict
from nftcast.training import Train
from nftcast.training import TrainingHistory
from nftcast.training import WriteHistory

from ._config import DumpRunConfig
from ._config import RunConfig

__all__ = [
    "CHECKPOINT_FILE",
    "COEFFICIENTS_FILE",
    "COMPARISON_FILE",
    "CONFIG_ECHO_FILE",
    "CmdCompare",
    "CmdCompareHorizons",
    "CmdDecompose",
    "CmdEval",
    "CmdForecast",
    "CmdSynth",
    "CmdTrain",
    "DECOMPOSITION_FILE",
    "DrawRunSynthSpec",
    "FORECAST_FILE",
    "HISTORY_FILE",
    "HORIZON_SWEEP_FILE",
    "LoadRunDataset",
    "LoadRunSeries",
    "REPORT_FILE",
    "SYNTH_DATA_FILE",
    "SYNTH_SERIES_DIR",
    "SYNTH_SPEC_FILE",
]

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CHECKPOINT_FILE = "model.ckpt"
HISTORY_FILE = "history.csv"
CONFIG_ECHO_FILE = "config.resolved"
REPORT_FILE = "report.txt"
FORECAST_FILE = "forecast.csv"
DECOMPOSITION_FILE = "decomposition.csv"
COEFFICIENTS_FILE = "coefficients.csv"
COMPARISON_FILE = "comparison.txt"
HORIZON_SWEEP_FILE = "horizon_sweep.txt"
SYNTH_DATA_FILE = "synthetic.csv"
SYNTH_SERIES_DIR = "series"
SYNTH_SPEC_FILE = "synth_spec.json"


def _PrepareOutDir(out_dir: PathLike) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def _WriteFrame(frame: pandas.DataFrame, path: Path) -> None:
    frame.to_csv(path, index=False, lineterminator="\n")


def DrawRunSynthSpec(config: RunConfig) -> SynthSpec:
    return DrawSynthSpec(
        variables=config.synth_variables,
        length=config.synth_length,
        trend_degree=config.synth_trend_degree,
        periods=config.synth_periods,
        mixing=config.synth_mixing,
        noise=config.synth_noise,
        seed=config.seed,
    )


def LoadRunSeries(config: RunConfig) -> List[RawSeries]:
    """
    :returns:
        The series named by the config: generated when `data_source` is synthetic, else read from
        `data_path` (a CSV file, or a directory of CSV files).

    :raises ParseError:
        If `data_path` does not exist or cannot be read.
    """
    if config.data_source == "synthetic":
        return GenerateSeriesList(DrawRunSynthSpec(config), config.synth_series)
    path = Path(config.data_path)
    if path.is_dir():
        return LoadCsvDirectory(path)
    return [LoadCsv(path)]


def LoadRunDataset(config: RunConfig) -> WindowedDataset:
    return BuildDataset(
        LoadRunSeries(config),
        config.lookback,
        config.horizon,
        config.stride,
        config.GetSplitSpec(),
        config.seed,
    )


def CmdTrain(config: RunConfig, out_dir: PathLike) -> Tuple[NFTModel, TrainingHistory]:
    """
    Builds the dataset, trains a fresh model and writes the best checkpoint, the per-epoch
    history and the resolved config.
    """
    out_dir = _PrepareOutDir(out_dir)
    dataset = LoadRunDataset(config)
    model = BuildModel(config.GetModelConfig(dataset.variables))
    model, history = Train(model, dataset, config.GetTrainingConfig())

    SaveCheckpoint(out_dir / CHECKPOINT_FILE, model, dataset.stats)
    WriteHistory(history, out_dir / HISTORY_FILE)
    DumpRunConfig(config, out_dir / CONFIG_ECHO_FILE)
    logger.info(
        "Trained %d epochs, best validation MSE %s at epoch %s; wrote %s",
        history.GetEpochCount(),
        history.GetBestValMse(),
        history.best_epoch,
        out_dir,
    )
    return model, history


def _CheckDataset(checkpoint: Checkpoint, dataset: WindowedDataset) -> None:
    checkpoint.model.CheckCompatible(dataset.variables, dataset.lookback, dataset.horizon)


def CmdEval(
    checkpoint_path: PathLike,
    config: RunConfig,
    out_dir: PathLike,
    split: Split = "test",
    method: str = "nft",
) -> MetricsReport:
    """
    Evaluates a checkpoint on one split of the config's data and writes a metrics report with
    per-horizon MSE on both scales.

    :raises CompatibilityError:
        If the checkpoint was trained for other dimensions than the config's data.
    """
    out_dir = _PrepareOutDir(out_dir)
    checkpoint = LoadCheckpoint(checkpoint_path)
    dataset = LoadRunDataset(config)
    _CheckDataset(checkpoint, dataset)

    result = Evaluate(checkpoint.model, dataset, split)
    report = MetricsReport(
        method=method,
        horizons=range(1, dataset.horizon + 1),
        mse=result.per_step.tolist(),
        raw_mse=None if result.raw_per_step is None else result.raw_per_step.tolist(),
        split=split,
        windows=len(result.per_window),
        aggregate_mse=result.aggregate,
        aggregate_raw_mse=result.raw_aggregate,
    )
    WriteReport(report, out_dir / REPORT_FILE)
    logger.info("%s MSE on the %s split: %s", method, split, report.aggregate_mse)
    return report


def _ReadInputWindow(
    checkpoint: Checkpoint, config: RunConfig, input_path: Optional[PathLike]
) -> Tuple[numpy.ndarray, RawSeries]:
    """
    :returns:
        The last `lookback` steps of the input series on the model's standardized scale
        ([M × t], missing entries at the training mean), and the series itself.
    """
    series = LoadCsv(input_path) if input_path is not None else LoadRunSeries(config)[0]
    model_config = checkpoint.model.config
    if series.variables != model_config.variables:
        raise CompatibilityError("variable count M", model_config.variables, series.variables)
    if series.length < model_config.lookback:
        raise ConfigurationError(
            f"Series {series.id!r} has {series.length} steps,"
            f" fewer than the lookback of {model_config.lookback}"
        )

    window = series.values[:, -model_config.lookback :]
    stats = checkpoint.stats
    if stats is not None:
        window = (window - stats.mean[:, None]) / stats.GetScale()[:, None]
    return numpy.nan_to_num(window, nan=0.0), series


def CmdForecast(
    checkpoint_path: PathLike,
    config: RunConfig,
    out_dir: PathLike,
    input_path: Optional[PathLike] = None,
) -> pandas.DataFrame:
    """
    Forecasts the H steps following the end of a series: `input_path` when given, else the
    first series of the config's data. Writes `forecast.csv` with one row per (variable, step).
    """
    out_dir = _PrepareOutDir(out_dir)
    checkpoint = LoadCheckpoint(checkpoint_path)
    window, series = _ReadInputWindow(checkpoint, config, input_path)

    forecast = Predict(checkpoint.model, window[None])[0]
    forecast_raw = forecast
    if checkpoint.stats is not None:
        forecast_raw = Destandardize(forecast, checkpoint.stats)
    horizon = forecast.shape[1]
    frame = pandas.DataFrame(
        {
            **_StepColumns(series, horizon),
            "forecast": forecast.ravel(),
            "forecast_raw": forecast_raw.ravel(),
        }
    )
    _WriteFrame(frame, out_dir / FORECAST_FILE)
    return frame


def _StepColumns(series: RawSeries, horizon: int) -> Dict[str, object]:
    """
    The time_index and variable columns of a variable-major [M × H] table; forecast step h of
    a series of length T sits at time index T + h − 1.
    """
    steps = numpy.arange(series.length, series.length + horizon)
    return {
        "time_index": numpy.tile(steps, series.variables),
        "variable": numpy.repeat(series.names, horizon),
    }


def _CoefficientRows(model: NFTModel) -> List[Dict[str, object]]:
    rows: List[Dict[str, object]] = []
    for stack_index, (kind, blocks) in enumerate(model.GetStacks()):
        for block_index, block in enumerate(blocks):
            coefficients = block.GetLastCoefficients()
            if coefficients is None:
                continue
            for target, values in zip(("forecast", "backcast"), coefficients):
                for (row, column), value in numpy.ndenumerate(values[0]):
                    rows.append(
                        {
                            "block": f"stack{stack_index}.block{block_index}",
                            "kind": kind,
                            "target": target,
                            "row": row,
                            "column": column,
                            "value": value,
                        }
                    )
    return rows


def CmdDecompose(
    checkpoint_path: PathLike,
    config: RunConfig,
    out_dir: PathLike,
    input_path: Optional[PathLike] = None,
    coefficients: bool = False,
) -> pandas.DataFrame:
    """
    Splits the forecast of one input window (chosen as in `CmdForecast`) into its per-stack
    components on the standardized scale and writes `decomposition.csv`: one row per
    (variable, step) with a column per stack kind present and the total.

    :param coefficients:
        Also write the basis coefficients every trend and seasonality block emitted for the
        window to `coefficients.csv`.
    """
    out_dir = _PrepareOutDir(out_dir)
    checkpoint = LoadCheckpoint(checkpoint_path)
    window, series = _ReadInputWindow(checkpoint, config, input_path)

    decomposition = DecomposeForecast(Tensor(window), checkpoint.model)
    total = decomposition.total.data
    horizon = total.shape[1]
    columns = _StepColumns(series, horizon)
    for kind in BLOCK_KINDS:
        if kind in decomposition.per_stack:
            columns[kind] = decomposition.GetComponent(kind).ravel()
    columns["total"] = total.ravel()
    frame = pandas.DataFrame(columns)
    _WriteFrame(frame, out_dir / DECOMPOSITION_FILE)

    if coefficients:
        coefficient_frame = pandas.DataFrame(
            _CoefficientRows(checkpoint.model),
            columns=["block", "kind", "target", "row", "column", "value"],
        )
        _WriteFrame(coefficient_frame, out_dir / COEFFICIENTS_FILE)
    return frame


def CmdSynth(config: RunConfig, out_dir: PathLike) -> List[RawSeries]:
    """
    Writes the synthetic series the config describes (one CSV, or one CSV per series in a
    `series` directory) and the generator parameters.
    """
    out_dir = _PrepareOutDir(out_dir)
    spec = DrawRunSynthSpec(config)
    series_list = GenerateSeriesList(spec, config.synth_series)
    if len(series_list) == 1:
        WriteCsv(series_list[0], out_dir / SYNTH_DATA_FILE)
    else:
        series_dir = _PrepareOutDir(out_dir / SYNTH_SERIES_DIR)
        for series in series_list:
            WriteCsv(series, series_dir / f"{series.id}.csv")
    WriteSynthSpec(spec, out_dir / SYNTH_SPEC_FILE)
    logger.info(
        "Wrote %d synthetic series of %d variables and %d steps to %s",
        len(series_list),
        spec.variables,
        spec.length,
        out_dir,
    )
    return series_list


def CmdCompare(report_a: PathLike, report_b: PathLike, out_dir: PathLike) -> Comparison:
    """
    Compares a model report (`report_a`) against a baseline report (`report_b`).

    :raises ComparisonError:
        If the reports cover different horizons.
    """
    out_dir = _PrepareOutDir(out_dir)
    comparison = CompareReports(LoadReport(report_a), LoadReport(report_b))
    WriteComparison(comparison, out_dir / COMPARISON_FILE)
    return comparison


def CmdCompareHorizons(
    model_reports: Sequence[PathLike], baseline_reports: Sequence[PathLike], out_dir: PathLike
) -> HorizonSweep:
    """
    Compares models trained for different forecast lengths against the best baseline report of
    each length, and correlates the forecast length with the improvement.

    :raises ComparisonError:
        If the model reports repeat a forecast length or some length has no baseline.
    """
    out_dir = _PrepareOutDir(out_dir)
    sweep = CompareHorizonSweep(
        [LoadReport(p) for p in model_reports], [LoadReport(p) for p in baseline_reports]
    )
    WriteHorizonSweep(sweep, out_dir / HORIZON_SWEEP_FILE)
    return sweep
