import attr
import numpy
import pytest
from pytest import approx

from nftcast.data import DrawSynthSpec
from nftcast.data import GenerateSeriesList
from nftcast.data import LoadSynthSpec
from nftcast.data import NoiseFloorMse
from nftcast.data import PreprocessStats
from nftcast.data import SynthGenerate
from nftcast.data import SynthSpec
from nftcast.data import WriteSynthSpec
from nftcast.exceptions import DimensionError
from nftcast.exceptions import DomainError


def testLinearTrendsOnly() -> None:
    spec = SynthSpec(
        length=50,
        trend=[[1.0, 2.0], [-3.0, 0.5]],
        frequencies=[],
        amplitudes=numpy.empty((2, 0)),
        phases=numpy.empty((2, 0)),
        mixing=numpy.ones((2, 2)),
        noise=0.0,
    )
    series = SynthGenerate(spec)
    s = numpy.arange(50) / 50
    assert numpy.abs(series.values[0] - (1.0 + 2.0 * s)).max() < 1e-12
    assert numpy.abs(series.values[1] - (-3.0 + 0.5 * s)).max() < 1e-12


def testPureSinusoids() -> None:
    spec = SynthSpec(
        length=120,
        trend=numpy.zeros((3, 1)),
        frequencies=[5.0],
        amplitudes=[[1.0], [2.0], [0.5]],
        phases=[[0.0], [1.0], [2.0]],
        mixing=numpy.zeros((3, 3)),
        noise=0.0,
    )
    series = SynthGenerate(spec)
    s = numpy.arange(120) / 120
    for i, (amplitude, phase) in enumerate([(1.0, 0.0), (2.0, 1.0), (0.5, 2.0)]):
        expected = amplitude * numpy.cos(2 * numpy.pi * 5.0 * s + phase)
        assert numpy.abs(series.values[i] - expected).max() < 1e-12


def testNoiseVariance() -> None:
    spec = DrawSynthSpec(variables=2, length=10000, noise=0.5, seed=8)
    noisy = SynthGenerate(spec)
    clean = SynthGenerate(attr.evolve(spec, noise=0.0))
    noise = noisy.values - clean.values
    for i in range(2):
        assert noise[i].var() == approx(0.25, rel=0.05)


def testDrawSynthSpec() -> None:
    spec = DrawSynthSpec(variables=4, length=3000, trend_degree=1, periods=[24, 60], seed=1)
    assert spec.trend.shape == (4, 2)
    assert spec.frequencies.tolist() == [125.0, 50.0]
    assert spec.amplitudes.shape == (4, 2)
    assert not numpy.diag(spec.mixing).any()
    assert numpy.abs(spec.mixing).max() <= 0.3

    again = DrawSynthSpec(variables=4, length=3000, trend_degree=1, periods=[24, 60], seed=1)
    assert numpy.array_equal(SynthGenerate(spec).values, SynthGenerate(again).values)

    with pytest.raises(DomainError):
        DrawSynthSpec(variables=0, length=10)
    with pytest.raises(DomainError):
        DrawSynthSpec(variables=2, length=10, periods=[0.0])
    with pytest.raises(DimensionError):
        attr.evolve(spec, mixing=numpy.zeros((3, 3)))


def testGenerateSeriesList() -> None:
    spec = DrawSynthSpec(variables=2, length=30, seed=2)
    assert [s.id for s in GenerateSeriesList(spec, 1)] == ["synthetic"]

    series_list = GenerateSeriesList(spec, 3)
    assert [s.id for s in series_list] == ["series000", "series001", "series002"]
    assert not numpy.array_equal(series_list[0].values, series_list[1].values)


def testNoiseFloorMse() -> None:
    spec = DrawSynthSpec(variables=2, length=10, noise=1.0)
    stats = PreprocessStats(mean=[0.0, 0.0], std=[2.0, 1.0], q1=[0.0, 0.0], q3=[0.0, 0.0])
    assert NoiseFloorMse(spec, stats) == approx(0.625)

    with pytest.raises(DimensionError):
        NoiseFloorMse(DrawSynthSpec(variables=3, length=10), stats)


def testSynthSpecFile(tmp_path) -> None:
    spec = DrawSynthSpec(variables=3, length=100, noise=0.2, seed=5)
    WriteSynthSpec(spec, tmp_path / "spec.json")
    loaded = LoadSynthSpec(tmp_path / "spec.json")
    assert loaded.ToDict() == spec.ToDict()
    assert numpy.array_equal(SynthGenerate(loaded).values, SynthGenerate(spec).values)
