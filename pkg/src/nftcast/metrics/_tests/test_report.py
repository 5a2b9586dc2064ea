import pytest
from pytest import approx

from nftcast.exceptions import ComparisonError
from nftcast.exceptions import DimensionError
from nftcast.exceptions import ParseError
from nftcast.metrics import CompareHorizonSweep
from nftcast.metrics import CompareReports
from nftcast.metrics import GetForecastLength
from nftcast.metrics import LoadReport
from nftcast.metrics import MetricsReport
from nftcast.metrics import PairedTTest
from nftcast.metrics import WriteComparison
from nftcast.metrics import WriteHorizonSweep
from nftcast.metrics import WriteReport


def testMetricsReport() -> None:
    report = MetricsReport("nft", [1, 2, 3], [0.5, 1.0, 1.5])
    assert report.aggregate_mse == 1.0
    assert report.aggregate_raw_mse is None

    with pytest.raises(DimensionError):
        MetricsReport("nft", [1, 2], [0.5])
    with pytest.raises(DimensionError):
        MetricsReport("nft", [1, 2], [0.5, 1.0], raw_mse=[1.0])
    with pytest.raises(DimensionError):
        MetricsReport("nft", [], [])


def testReportFile(tmp_path) -> None:
    report = MetricsReport(
        "nft",
        [1, 2, 3],
        [0.1, 0.2, 0.30000000000000004],
        raw_mse=[1.5, 2.5, 3.5],
        windows=14,
        aggregate_mse=0.2,
        aggregate_raw_mse=2.5,
    )
    path = tmp_path / "report.txt"
    WriteReport(report, path)
    assert path.read_text().splitlines()[:7] == [
        "# nftcast metrics report",
        "method = nft",
        "split = test",
        "windows = 14",
        "aggregate_mse = 0.2",
        "aggregate_raw_mse = 2.5",
        "",
    ]
    assert LoadReport(path) == report

    plain = MetricsReport("baseline", [1, 2], [1.0, 2.0])
    WriteReport(plain, path)
    assert path.read_text().splitlines()[-3:] == ["horizon,mse", "1,1.0", "2,2.0"]
    assert LoadReport(path) == plain


def testLoadReportErrors(tmp_path) -> None:
    path = tmp_path / "report.txt"
    path.write_text("something else\n")
    with pytest.raises(ParseError, match="line 1"):
        LoadReport(path)

    path.write_text(
        "# nftcast metrics report\nmethod = a\nsplit = test\nwindows = 1\naggregate_mse = 1.0\n"
        "\nhorizon,mse\n1,1.0\n2,oops\n"
    )
    with pytest.raises(ParseError, match="line 9"):
        LoadReport(path)

    path.write_text("# nftcast metrics report\nmethod = a\n\nhorizon,mse\n1,1.0\n")
    with pytest.raises(ParseError, match="missing key"):
        LoadReport(path)


def testCompareHalvedError() -> None:
    model = MetricsReport("nft", [1, 2, 3], [1.0, 2.0, 4.0])
    baseline = MetricsReport("baseline", [1, 2, 3], [2.0, 4.0, 8.0])
    comparison = CompareReports(model, baseline)
    assert comparison.improvements == (50.0, 50.0, 50.0)
    assert comparison.mean_improvement == 50.0
    assert comparison.correlation is None
    assert comparison.t_test is not None
    assert comparison.t_test.t_statistic < 0
    assert len(comparison.notices) == 1
    assert comparison.notices[0].startswith("correlation undefined")


def testCompareIdentical() -> None:
    report = MetricsReport("nft", [1, 2, 3], [1.0, 2.0, 4.0])
    comparison = CompareReports(report, report)
    assert comparison.improvements == (0.0, 0.0, 0.0)
    assert comparison.t_test is None
    assert comparison.correlation is None
    assert [n.split(":")[0] for n in comparison.notices] == [
        "correlation undefined",
        "t-test undefined",
    ]


def testCompareImprovementTrend() -> None:
    model = MetricsReport("nft", [1, 2, 3], [0.9, 0.8, 0.7])
    baseline = MetricsReport("baseline", [1, 2, 3], [1.0, 1.0, 1.0])
    comparison = CompareReports(model, baseline)
    assert comparison.improvements == approx((10.0, 20.0, 30.0))
    assert comparison.correlation == approx(1.0, abs=1e-12)
    assert comparison.mean_improvement == approx(sum(comparison.improvements) / 3)


def testCompareErrors() -> None:
    with pytest.raises(ComparisonError, match="different horizons"):
        CompareReports(MetricsReport("a", [1, 2], [1.0, 2.0]), MetricsReport("b", [1], [1.0]))

    comparison = CompareReports(
        MetricsReport("a", [1, 2, 3], [1.0, 2.0, 2.5]),
        MetricsReport("b", [1, 2, 3], [0.0, 3.0, 5.0]),
    )
    assert comparison.improvements[0] is None
    assert comparison.improvements[1:] == approx((100.0 / 3, 50.0))
    assert comparison.notices[0] == "improvement undefined at horizon 1: baseline MSE is 0.0"


def testComparisonFile(tmp_path) -> None:
    comparison = CompareReports(
        MetricsReport("nft", [1, 2], [1.0, 2.0]), MetricsReport("base", [1, 2], [2.0, 2.0])
    )
    path = tmp_path / "comparison.txt"
    WriteComparison(comparison, path)
    lines = path.read_text().splitlines()
    assert lines[:4] == [
        "# nftcast comparison",
        "model = nft",
        "baseline = base",
        "mean_improvement_percent = 25.0",
    ]
    assert "pearson_r = -1.0" in lines
    assert lines[-3:] == [
        "horizon,model_mse,baseline_mse,improvement_percent",
        "1,1.0,2.0,50.0",
        "2,2.0,2.0,0.0",
    ]


def _SweepReport(method: str, length: int, aggregate: float) -> MetricsReport:
    horizons = range(1, length + 1)
    return MetricsReport(method, horizons, [aggregate] * length, aggregate_mse=aggregate)


def testCompareHorizonSweep() -> None:
    models = [
        _SweepReport("nft", 96, 0.6),
        _SweepReport("nft", 24, 0.9),
        _SweepReport("nft", 48, 0.8),
    ]
    baselines = [
        _SweepReport("tcn", 24, 1.0),
        _SweepReport("dlinear", 24, 1.2),
        _SweepReport("tcn", 48, 1.0),
        _SweepReport("tcn", 96, 1.5),
        _SweepReport("dlinear", 96, 1.0),
        _SweepReport("dlinear", 12, 0.1),
    ]
    assert GetForecastLength(models[0]) == 96

    sweep = CompareHorizonSweep(models, baselines)
    assert sweep.model == "nft"
    assert sweep.forecast_lengths == (24, 48, 96)
    assert sweep.model_mse == (0.9, 0.8, 0.6)
    assert sweep.baselines == ("tcn", "tcn", "dlinear")
    assert sweep.baseline_mse == (1.0, 1.0, 1.0)
    assert sweep.improvements == approx((10.0, 20.0, 40.0))
    assert sweep.mean_improvement == approx(70.0 / 3)
    # Improvement grows linearly with the forecast length.
    assert sweep.correlation == approx(1.0, abs=1e-12)
    assert sweep.t_test is not None
    expected = PairedTTest([0.9, 0.8, 0.6], [1.0, 1.0, 1.0])
    assert sweep.t_test.t_statistic == approx(expected.t_statistic)
    assert sweep.t_test.t_statistic < 0
    assert sweep.notices == ()


def testCompareHorizonSweepSingleLength() -> None:
    sweep = CompareHorizonSweep([_SweepReport("nft", 24, 0.5)], [_SweepReport("tcn", 24, 1.0)])
    assert sweep.improvements == (50.0,)
    assert sweep.mean_improvement == 50.0
    assert sweep.correlation is None
    assert sweep.t_test is None
    assert sweep.notices[0].startswith("correlation undefined")
    assert sweep.notices[1].startswith("t-test undefined")


def testCompareHorizonSweepErrors() -> None:
    baseline = [_SweepReport("tcn", 24, 1.0)]
    with pytest.raises(ComparisonError, match="No model report"):
        CompareHorizonSweep([], baseline)
    with pytest.raises(ComparisonError, match="forecast length 24"):
        CompareHorizonSweep([_SweepReport("nft", 24, 0.5), _SweepReport("nft", 24, 0.4)], baseline)
    with pytest.raises(ComparisonError, match="different methods"):
        CompareHorizonSweep([_SweepReport("nft", 24, 0.5), _SweepReport("fc", 48, 0.4)], baseline)
    with pytest.raises(ComparisonError, match=r"No baseline report for forecast lengths \[48\]"):
        CompareHorizonSweep([_SweepReport("nft", 24, 0.5), _SweepReport("nft", 48, 0.4)], baseline)


def testHorizonSweepFile(tmp_path) -> None:
    sweep = CompareHorizonSweep(
        [_SweepReport("nft", 24, 1.0), _SweepReport("nft", 48, 1.5)],
        [_SweepReport("tcn", 24, 2.0), _SweepReport("dlinear", 48, 2.0)],
    )
    path = tmp_path / "horizon_sweep.txt"
    WriteHorizonSweep(sweep, path)
    lines = path.read_text().splitlines()
    assert lines[:4] == [
        "# nftcast horizon sweep",
        "model = nft",
        "mean_improvement_percent = 37.5",
        "pearson_r = -1.0",
    ]
    assert lines[-3:] == [
        "forecast_length,model_mse,baseline,baseline_mse,improvement_percent",
        "24,1.0,tcn,2.0,50.0",
        "48,1.5,dlinear,2.0,25.0",
    ]
