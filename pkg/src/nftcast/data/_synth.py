"""
Synthetic multivariate series with known structure, for tests and desk-scale experiments:

    y[i, s] = poly_i(s/T) + Σ_j (I + mixing)[i, j] · harmonic_j(s) + noise

    harmonic_j(s) = Σ_h amplitude[j, h] · cos(2π · frequency[h] · s/T + phase[j, h])
"""

import json
from pathlib import Path
from typing import List
from typing import Sequence
from typing import Tuple
from typing import Union

import attr
import numpy

from nftcast.exceptions import DimensionError
from nftcast.exceptions import DomainError

from ._preprocess import PreprocessStats
from ._series import RawSeries

__all__ = [
    "DrawSynthSpec",
    "GenerateSeriesList",
    "LoadSynthSpec",
    "NoiseFloorMse",
    "SynthGenerate",
    "SynthSpec",
    "WriteSynthSpec",
]


def _Array(value: Sequence) -> numpy.ndarray:
    return numpy.array(value, dtype=numpy.float64)


@attr.s(auto_attribs=True, frozen=True, eq=False)
class SynthSpec:
    """
    Every parameter of the generator; written next to generated data so oracles can recompute
    the noise floor.

    :ivar trend:
        [M × (degree + 1)] polynomial coefficients in ascending powers of s/T.

    :ivar frequencies:
        [n_harmonics] cycles per series length.

    :ivar amplitudes:
        [M × n_harmonics]

    :ivar phases:
        [M × n_harmonics]

    :ivar mixing:
        [M × M] cross-variable mixing; the applied matrix is I + mixing.

    :ivar noise:
        Standard deviation σ of the additive Gaussian noise.
    """

    length: int
    trend: numpy.ndarray = attr.ib(converter=_Array)
    frequencies: numpy.ndarray = attr.ib(converter=_Array)
    amplitudes: numpy.ndarray = attr.ib(converter=_Array)
    phases: numpy.ndarray = attr.ib(converter=_Array)
    mixing: numpy.ndarray = attr.ib(converter=_Array)
    noise: float = 0.0
    seed: int = 0

    def __attrs_post_init__(self) -> None:
        if self.length < 1:
            raise DomainError(f"Synthetic length must be at least 1, got {self.length}")
        if self.noise < 0:
            raise DomainError(f"Noise standard deviation must be non-negative, got {self.noise}")
        if self.trend.ndim != 2 or self.frequencies.ndim != 1:
            raise DimensionError("SynthSpec", self.trend.shape, self.frequencies.shape)
        m = self.trend.shape[0]
        n_harmonics = self.frequencies.shape[0]
        for name, array, wanted in (
            ("amplitudes", self.amplitudes, (m, n_harmonics)),
            ("phases", self.phases, (m, n_harmonics)),
            ("mixing", self.mixing, (m, m)),
        ):
            if array.shape != wanted:
                raise DimensionError(f"SynthSpec.{name}", array.shape, wanted)

    def GetVariables(self) -> int:
        return self.trend.shape[0]

    variables = property(GetVariables)

    def ToDict(self) -> dict:
        return {
            "length": self.length,
            "trend": self.trend.tolist(),
            "frequencies": self.frequencies.tolist(),
            "amplitudes": self.amplitudes.tolist(),
            "phases": self.phases.tolist(),
            "mixing": self.mixing.tolist(),
            "noise": self.noise,
            "seed": self.seed,
        }


def DrawSynthSpec(
    variables: int,
    length: int,
    trend_degree: int = 1,
    periods: Sequence[float] = (24.0, 60.0),
    mixing: float = 0.3,
    noise: float = 0.1,
    seed: int = 0,
) -> SynthSpec:
    """
    Draws random generator parameters with a seeded generator.

    :param periods:
        Harmonic periods, in time steps.

    :param mixing:
        Scale of the off-diagonal mixing entries (uniform in [−mixing, mixing]); 0 disables
        mixing.
    """
    if variables < 1 or trend_degree < 0:
        raise DomainError(f"Invalid synthetic sizes: variables={variables}, degree={trend_degree}")
    if any(p <= 0 for p in periods):
        raise DomainError(f"Harmonic periods must be positive, got {list(periods)}")
    rng = numpy.random.default_rng(seed)
    n_harmonics = len(periods)
    mixing_matrix = rng.uniform(-mixing, mixing, size=(variables, variables))
    numpy.fill_diagonal(mixing_matrix, 0.0)
    return SynthSpec(
        length=length,
        trend=rng.uniform(-1.0, 1.0, size=(variables, trend_degree + 1)),
        frequencies=[length / p for p in periods],
        amplitudes=rng.uniform(0.5, 1.5, size=(variables, n_harmonics)),
        phases=rng.uniform(0.0, 2 * numpy.pi, size=(variables, n_harmonics)),
        mixing=mixing_matrix,
        noise=noise,
        seed=seed,
    )


def _Components(spec: SynthSpec) -> Tuple[numpy.ndarray, numpy.ndarray]:
    s = numpy.arange(spec.length) / spec.length
    powers = s[None, :] ** numpy.arange(spec.trend.shape[1])[:, None]
    trend = spec.trend @ powers

    angle = 2 * numpy.pi * spec.frequencies[None, :, None] * s[None, None, :]
    waves = spec.amplitudes[:, :, None] * numpy.cos(angle + spec.phases[:, :, None])
    harmonics = waves.sum(axis=1)
    seasonal = (numpy.eye(spec.variables) + spec.mixing) @ harmonics
    return trend, seasonal


def SynthGenerate(spec: SynthSpec, series_index: int = 0, id: str = "synthetic") -> RawSeries:
    """
    :param series_index:
        Selects an independent noise stream, so several series can share one spec.
    """
    trend, seasonal = _Components(spec)
    rng = numpy.random.default_rng([spec.seed, series_index])
    noise = rng.normal(0.0, spec.noise, size=trend.shape) if spec.noise > 0 else 0.0
    names = [f"v{i}" for i in range(spec.variables)]
    return RawSeries(id, names, trend + seasonal + noise)


def NoiseFloorMse(spec: SynthSpec, stats: PreprocessStats) -> float:
    """
    :returns:
        The irreducible MSE on standardized scale, mean_i σ² / scale_i², where scale_i is the
        standardization divisor of variable i.
    """
    if stats.variables != spec.variables:
        raise DimensionError("NoiseFloorMse", (spec.variables,), (stats.variables,))
    return float(numpy.mean(spec.noise ** 2 / stats.GetScale() ** 2))


def WriteSynthSpec(spec: SynthSpec, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(spec.ToDict(), indent=2, sort_keys=True) + "\n")


def LoadSynthSpec(path: Union[str, Path]) -> SynthSpec:
    contents = json.loads(Path(path).read_text())
    return SynthSpec(**contents)


def GenerateSeriesList(spec: SynthSpec, count: int) -> List[RawSeries]:
    if count == 1:
        return [SynthGenerate(spec)]
    return [SynthGenerate(spec, i, id=f"series{i:03d}") for i in range(count)]
