from pathlib import Path
from typing import Any

import attr
import numpy
import pandas
import pytest
from pytest import approx

from nftcast.cli import CHECKPOINT_FILE
from nftcast.cli import COEFFICIENTS_FILE
from nftcast.cli import COMPARISON_FILE
from nftcast.cli import CONFIG_ECHO_FILE
from nftcast.cli import DECOMPOSITION_FILE
from nftcast.cli import EXIT_OK
from nftcast.cli import EXIT_USER_ERROR
from nftcast.cli import FORECAST_FILE
from nftcast.cli import HISTORY_FILE
from nftcast.cli import HORIZON_SWEEP_FILE
from nftcast.cli import REPORT_FILE
from nftcast.cli import SYNTH_DATA_FILE
from nftcast.cli import SYNTH_SPEC_FILE
from nftcast.cli import CmdDecompose
from nftcast.cli import CmdEval
from nftcast.cli import CmdForecast
from nftcast.cli import CmdSynth
from nftcast.cli import CmdTrain
from nftcast.cli import DumpRunConfig
from nftcast.cli import LoadRunConfig
from nftcast.cli import LoadRunSeries
from nftcast.cli import RunConfig
from nftcast.cli import main
from nftcast.data import LoadSynthSpec
from nftcast.metrics import LoadReport
from nftcast.metrics import MetricsReport
from nftcast.metrics import WriteReport
from nftcast.model import BuildModel
from nftcast.model import LoadCheckpoint
from nftcast.training import LoadHistory


def CreateRunConfig(**kwargs: Any) -> RunConfig:
    """
    :returns:
        A run over 3 synthetic variables of 200 steps, lookback 8 and horizon 5, with a tiny
        model trained for 2 epochs.
    """
    values = dict(
        synth_variables=3,
        synth_length=200,
        lookback=8,
        horizon=5,
        blocks_per_stack=1,
        fourier_order=4,
        tcn_hidden_channels=4,
        tcn_kernel_size=2,
        tcn_dilations=(1, 2),
        epochs=2,
        seed=7,
    )
    values.update(kwargs)
    return RunConfig(**values)


@pytest.fixture
def run_config() -> RunConfig:
    return CreateRunConfig()


@pytest.fixture
def trained(tmp_path, run_config) -> Path:
    """
    :returns:
        The output directory of a `train` run of `run_config`.
    """
    out_dir = tmp_path / "trained"
    CmdTrain(run_config, out_dir)
    return out_dir


def testTrainWritesOutputs(trained, run_config) -> None:
    assert LoadRunConfig(trained / CONFIG_ECHO_FILE) == run_config
    history = LoadHistory(trained / HISTORY_FILE)
    assert history.GetEpochCount() == 2

    checkpoint = LoadCheckpoint(trained / CHECKPOINT_FILE)
    assert checkpoint.model.config == run_config.GetModelConfig(3)
    assert checkpoint.stats is not None
    assert checkpoint.stats.variables == 3


def testTrainIsReproducible(tmp_path, run_config) -> None:
    CmdTrain(run_config, tmp_path / "a")
    CmdTrain(run_config, tmp_path / "b")
    for name in (CHECKPOINT_FILE, HISTORY_FILE, CONFIG_ECHO_FILE):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    CmdTrain(attr.evolve(run_config, seed=8), tmp_path / "c")
    assert (tmp_path / "a" / CHECKPOINT_FILE).read_bytes() != (
        tmp_path / "c" / CHECKPOINT_FILE
    ).read_bytes()


def testZeroEpochsSavesInitialization(tmp_path, run_config) -> None:
    config = attr.evolve(run_config, epochs=0)
    CmdTrain(config, tmp_path)
    loaded = LoadCheckpoint(tmp_path / CHECKPOINT_FILE).model.GetParameterValues()
    initial = BuildModel(config.GetModelConfig(3)).GetParameterValues()
    assert loaded.keys() == initial.keys()
    for key, value in initial.items():
        assert numpy.array_equal(loaded[key], value)


def testEvalReproducesBestValidation(trained, run_config) -> None:
    history = LoadHistory(trained / HISTORY_FILE)
    report = CmdEval(trained / CHECKPOINT_FILE, run_config, trained, split="val")
    assert report.aggregate_mse == approx(history.GetBestValMse(), abs=1e-12)


def testEvalReport(trained, run_config) -> None:
    report = CmdEval(trained / CHECKPOINT_FILE, run_config, trained)
    assert LoadReport(trained / REPORT_FILE) == report
    assert report.split == "test"
    assert report.horizons == (1, 2, 3, 4, 5)
    assert report.raw_mse is not None
    assert report.windows == 28
    assert report.aggregate_mse == approx(numpy.mean(report.mse))


def testEvalIncompatibleCheckpoint(trained, run_config, tmp_path, capsys) -> None:
    config_path = tmp_path / "two_variables.cfg"
    DumpRunConfig(attr.evolve(run_config, synth_variables=2), config_path)
    argv = ["eval", str(trained / CHECKPOINT_FILE), "--config", str(config_path)]
    assert main(argv + ["--out", str(tmp_path / "eval")]) == EXIT_USER_ERROR
    err = capsys.readouterr().err.strip().splitlines()
    assert err[-1] == (
        "nftcast: error: Checkpoint is incompatible: variable count M is 3 but data has 2"
    )


def testMissingDataPath(tmp_path, capsys) -> None:
    missing = tmp_path / "no_such_file.csv"
    config_path = tmp_path / "run.cfg"
    config_path.write_text(f"data_source = csv\ndata_path = {missing}\n")
    assert main(["train", "--config", str(config_path), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert err[-1].startswith("nftcast: error: ")
    assert str(missing) in err[-1]
    assert not (tmp_path / CHECKPOINT_FILE).exists()


def testMainTrainWithSeedOverride(tmp_path, run_config) -> None:
    config_path = tmp_path / "run.cfg"
    DumpRunConfig(run_config, config_path)
    out_dir = tmp_path / "out"
    argv = ["train", "--config", str(config_path), "--seed", "3", "--out", str(out_dir)]
    assert main(argv) == EXIT_OK
    assert LoadRunConfig(out_dir / CONFIG_ECHO_FILE).seed == 3


def testMainUsageErrors(capsys) -> None:
    assert main([]) == EXIT_USER_ERROR
    assert main(["fit"]) == EXIT_USER_ERROR
    assert main(["--help"]) == EXIT_OK
    assert "decompose" in capsys.readouterr().out


def testDecompose(trained, run_config) -> None:
    frame = CmdDecompose(trained / CHECKPOINT_FILE, run_config, trained)
    written = pandas.read_csv(trained / DECOMPOSITION_FILE, float_precision="round_trip")
    assert list(written.columns) == ["time_index", "variable", "trend", "seasonality", "total"]
    assert len(written) == 15
    assert list(written["variable"]) == ["v0"] * 5 + ["v1"] * 5 + ["v2"] * 5
    assert list(written["time_index"][:5]) == [200, 201, 202, 203, 204]
    assert numpy.allclose(written["trend"] + written["seasonality"], written["total"], atol=1e-9)
    assert numpy.array_equal(written["total"].to_numpy(), frame["total"].to_numpy())


def testDecomposeTrendOnly(tmp_path) -> None:
    config = CreateRunConfig(stacks=("trend",), epochs=1)
    CmdTrain(config, tmp_path)
    CmdDecompose(tmp_path / CHECKPOINT_FILE, config, tmp_path, coefficients=True)
    written = pandas.read_csv(tmp_path / DECOMPOSITION_FILE, float_precision="round_trip")
    assert list(written.columns) == ["time_index", "variable", "trend", "total"]
    assert numpy.array_equal(written["trend"].to_numpy(), written["total"].to_numpy())

    coefficients = pandas.read_csv(tmp_path / COEFFICIENTS_FILE, float_precision="round_trip")
    assert list(coefficients.columns) == ["block", "kind", "target", "row", "column", "value"]
    # One trend block, M × d coefficients for each of forecast and backcast.
    assert len(coefficients) == 2 * 3 * config.degree
    assert set(coefficients["block"]) == {"stack0.block0"}
    assert set(coefficients["target"]) == {"forecast", "backcast"}


def testForecast(trained, run_config, tmp_path) -> None:
    frame = CmdForecast(trained / CHECKPOINT_FILE, run_config, trained)
    written = pandas.read_csv(trained / FORECAST_FILE, float_precision="round_trip")
    assert list(written.columns) == ["time_index", "variable", "forecast", "forecast_raw"]
    assert len(written) == 15
    assert numpy.array_equal(written["forecast"].to_numpy(), frame["forecast"].to_numpy())

    stats = LoadCheckpoint(trained / CHECKPOINT_FILE).stats
    assert stats is not None
    scale = numpy.repeat(stats.GetScale(), 5)
    mean = numpy.repeat(stats.mean, 5)
    assert written["forecast_raw"].to_numpy() == approx(
        written["forecast"].to_numpy() * scale + mean, rel=1e-12, abs=1e-12
    )

    decomposition = CmdDecompose(trained / CHECKPOINT_FILE, run_config, trained)
    assert frame["forecast"].to_numpy() == approx(decomposition["total"].to_numpy(), abs=1e-12)


def testForecastFromInputFile(trained, run_config, tmp_path) -> None:
    CmdSynth(attr.evolve(run_config, synth_length=30), tmp_path)
    frame = CmdForecast(
        trained / CHECKPOINT_FILE, run_config, tmp_path, input_path=tmp_path / SYNTH_DATA_FILE
    )
    assert list(frame["time_index"][:5]) == [30, 31, 32, 33, 34]

    CmdSynth(attr.evolve(run_config, synth_variables=2), tmp_path / "narrow")
    argv = ["forecast", str(trained / CHECKPOINT_FILE), "--out", str(tmp_path)]
    argv += ["--input", str(tmp_path / "narrow" / SYNTH_DATA_FILE)]
    assert main(argv) == EXIT_USER_ERROR


def testSynth(tmp_path, run_config) -> None:
    series_list = CmdSynth(run_config, tmp_path)
    assert len(series_list) == 1
    assert LoadSynthSpec(tmp_path / SYNTH_SPEC_FILE).variables == 3

    from_csv = LoadRunSeries(
        attr.evolve(run_config, data_source="csv", data_path=str(tmp_path / SYNTH_DATA_FILE))
    )
    assert from_csv[0].names == series_list[0].names
    assert numpy.array_equal(from_csv[0].values, series_list[0].values)


def testSynthSeriesDirectory(tmp_path, run_config) -> None:
    config = attr.evolve(run_config, synth_series=3)
    CmdSynth(config, tmp_path)
    files = sorted(p.name for p in (tmp_path / "series").iterdir())
    assert files == ["series000.csv", "series001.csv", "series002.csv"]

    csv_config = attr.evolve(config, data_source="csv", data_path=str(tmp_path / "series"))
    assert [s.id for s in LoadRunSeries(csv_config)] == [s.id for s in LoadRunSeries(config)]


def _WriteReport(path: Path, mse: Any) -> str:
    WriteReport(MetricsReport("nft", range(1, len(mse) + 1), mse), path)
    return str(path)


def testCompareIdenticalReports(tmp_path) -> None:
    report = _WriteReport(tmp_path / "a.txt", [1.0, 2.0, 4.0])
    assert main(["compare", report, report, "--out", str(tmp_path)]) == EXIT_OK
    lines = (tmp_path / COMPARISON_FILE).read_text().splitlines()
    assert "mean_improvement_percent = 0.0" in lines
    assert "t_statistic = undefined" in lines
    assert any(line.startswith("notice = t-test undefined") for line in lines)


def testCompareHalvedError(tmp_path) -> None:
    model = _WriteReport(tmp_path / "model.txt", [1.0, 2.0, 3.0])
    baseline = _WriteReport(tmp_path / "baseline.txt", [2.0, 4.0, 6.0])
    assert main(["compare", model, baseline, "--out", str(tmp_path)]) == EXIT_OK
    lines = (tmp_path / COMPARISON_FILE).read_text().splitlines()
    assert lines[-3:] == ["1,1.0,2.0,50.0", "2,2.0,4.0,50.0", "3,3.0,6.0,50.0"]
    assert "pearson_r = undefined" in lines


def testCompareMismatchedHorizons(tmp_path, capsys) -> None:
    a = _WriteReport(tmp_path / "a.txt", [1.0, 2.0, 3.0])
    b = _WriteReport(tmp_path / "b.txt", [1.0, 2.0])
    assert main(["compare", a, b, "--out", str(tmp_path)]) == EXIT_USER_ERROR
    assert "different horizons" in capsys.readouterr().err

    assert main(["compare", a, str(tmp_path / "absent.txt"), "--out", str(tmp_path)]) == 2


def testCompareHorizons(tmp_path, capsys) -> None:
    def Write(name: str, method: str, length: int, aggregate: float) -> str:
        report = MetricsReport(
            method, range(1, length + 1), [aggregate] * length, aggregate_mse=aggregate
        )
        WriteReport(report, tmp_path / name)
        return str(tmp_path / name)

    models = [Write("nft24.txt", "nft", 24, 1.0), Write("nft48.txt", "nft", 48, 1.5)]
    baselines = [
        Write("tcn24.txt", "tcn", 24, 2.0),
        Write("tcn48.txt", "tcn", 48, 3.0),
        Write("fc48.txt", "fc", 48, 2.0),
    ]
    out_dir = tmp_path / "sweep"
    argv = ["compare-horizons", "--model", *models, "--baseline", *baselines]
    assert main(argv + ["--out", str(out_dir)]) == EXIT_OK
    lines = (out_dir / HORIZON_SWEEP_FILE).read_text().splitlines()
    assert "pearson_r = -1.0" in lines
    assert lines[-2:] == ["24,1.0,tcn,2.0,50.0", "48,1.5,fc,2.0,25.0"]

    argv = ["compare-horizons", "--model", *models, "--baseline", baselines[0]]
    assert main(argv + ["--out", str(out_dir)]) == EXIT_USER_ERROR
    assert "No baseline report for forecast lengths [48]" in capsys.readouterr().err
