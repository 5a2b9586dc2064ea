"""
Run configuration files.

A config file is a flat list of ``key = value`` lines; ``#`` starts a comment and blank lines are
ignored. List values are comma separated. Every key is optional and defaults as below; unknown
or repeated keys are errors.

======================  ==========================  ============================================
Key                     Default                     Meaning
======================  ==========================  ============================================
data_source             synthetic                   ``csv`` or ``synthetic``
data_path                                           CSV file, or directory of CSV files
protocol                1                           1: split in time, 2: split by series
ratios                  0.7, 0.1, 0.2               train, validation and test fractions
lookback                48                          input window length t
horizon                 12                          forecast length H
stride                  1                           step between window starts
stacks                  trend, seasonality          stack kinds, in order
blocks_per_stack        2
fourier_order           8                           N, drives the seasonality time basis
degree                  4                           d, polynomial terms of trend blocks
learner                 tcn                         ``tcn`` or ``fc`` coefficient learner
tcn_hidden_channels     32
tcn_kernel_size         3
tcn_dilations           1, 2, 4
fc_layers               4
fc_units                256
learning_rate           0.001
epochs                  200
batch_size              32
patience                20                          epochs without improvement before stopping
shuffle                 true
seed                    0                           model, shuffling, split and synthetic data
out_dir                 nftcast-run
synth_variables         4
synth_length            3000
synth_series            1
synth_trend_degree      1
synth_periods           24.0, 60.0                  harmonic periods in time steps
synth_mixing            0.3                         scale of the cross-variable mixing
synth_noise             0.1                         noise standard deviation
======================  ==========================  ============================================
"""

from pathlib import Path
from typing import Any
from typing import Callable
from typing import Dict
from typing import Tuple
from typing import Union

import attr

from nftcast.basic.format_float import FloatFromString
from nftcast.basic.format_float import FormatFloat
from nftcast.data import SplitSpec
from nftcast.exceptions import ConfigurationError
from nftcast.exceptions import ParseError
from nftcast.model import ModelConfig
from nftcast.training import TrainingConfig

__all__ = ["DumpRunConfig", "LoadRunConfig", "RunConfig"]

PathLike = Union[str, Path]


def _ParseBool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _ParseList(item: Callable[[str], Any]) -> Callable[[str], Tuple[Any, ...]]:
    def Parse(text: str) -> Tuple[Any, ...]:
        return tuple(item(cell.strip()) for cell in text.split(",") if cell.strip())

    return Parse


def _Field(default: Any, parse: Callable[[str], Any], **kwargs: Any) -> Any:
    return attr.ib(default=default, metadata={"parse": parse}, **kwargs)


def _OneOf(*choices: str) -> Callable[[object, "attr.Attribute[str]", str], None]:
    def Validate(instance: object, attribute: "attr.Attribute[str]", value: str) -> None:
        if value not in choices:
            raise ConfigurationError(
                f"{attribute.name} must be one of {list(choices)}, got {value!r}"
            )

    return Validate


def _AtLeast(minimum: float) -> Callable[[object, "attr.Attribute[float]", float], None]:
    def Validate(instance: object, attribute: "attr.Attribute[float]", value: float) -> None:
        if value < minimum:
            raise ConfigurationError(f"{attribute.name} must be at least {minimum}, got {value}")

    return Validate


@attr.s(auto_attribs=True, frozen=True)
class RunConfig:
    """
    Everything a command needs besides its file arguments. See the module docstring for the
    meaning of each key.
    """

    data_source: str = _Field("synthetic", str, validator=_OneOf("csv", "synthetic"))
    data_path: str = _Field("", str)
    protocol: int = _Field(1, int)
    ratios: Tuple[float, ...] = _Field(
        (0.7, 0.1, 0.2), _ParseList(FloatFromString), converter=tuple
    )
    lookback: int = _Field(48, int)
    horizon: int = _Field(12, int)
    stride: int = _Field(1, int)
    stacks: Tuple[str, ...] = _Field(("trend", "seasonality"), _ParseList(str), converter=tuple)
    blocks_per_stack: int = _Field(2, int)
    fourier_order: int = _Field(8, int)
    degree: int = _Field(4, int)
    learner: str = _Field("tcn", str)
    tcn_hidden_channels: int = _Field(32, int)
    tcn_kernel_size: int = _Field(3, int)
    tcn_dilations: Tuple[int, ...] = _Field((1, 2, 4), _ParseList(int), converter=tuple)
    fc_layers: int = _Field(4, int)
    fc_units: int = _Field(256, int)
    learning_rate: float = _Field(1e-3, FloatFromString)
    epochs: int = _Field(200, int)
    batch_size: int = _Field(32, int)
    patience: int = _Field(20, int)
    shuffle: bool = _Field(True, _ParseBool)
    seed: int = _Field(0, int)
    out_dir: str = _Field("nftcast-run", str)
    synth_variables: int = _Field(4, int, validator=_AtLeast(1))
    synth_length: int = _Field(3000, int, validator=_AtLeast(1))
    synth_series: int = _Field(1, int, validator=_AtLeast(1))
    synth_trend_degree: int = _Field(1, int, validator=_AtLeast(0))
    synth_periods: Tuple[float, ...] = _Field(
        (24.0, 60.0), _ParseList(FloatFromString), converter=tuple
    )
    synth_mixing: float = _Field(0.3, FloatFromString, validator=_AtLeast(0.0))
    synth_noise: float = _Field(0.1, FloatFromString, validator=_AtLeast(0.0))

    def __attrs_post_init__(self) -> None:
        if self.data_source == "csv" and not self.data_path:
            raise ConfigurationError("data_path is required when data_source is csv")
        for name in ("lookback", "horizon", "stride"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be at least 1, got {getattr(self, name)}")
        if any(p <= 0 for p in self.synth_periods):
            raise ConfigurationError(
                f"synth_periods must be positive, got {list(self.synth_periods)}"
            )
        self.GetSplitSpec()
        self.GetModelConfig(variables=1)
        self.GetTrainingConfig()

    def GetSplitSpec(self) -> SplitSpec:
        return SplitSpec(self.protocol, self.ratios)

    def GetModelConfig(self, variables: int) -> ModelConfig:
        return ModelConfig(
            variables=variables,
            lookback=self.lookback,
            horizon=self.horizon,
            stacks=self.stacks,
            blocks_per_stack=self.blocks_per_stack,
            fourier_order=self.fourier_order,
            degree=self.degree,
            learner=self.learner,
            tcn_hidden_channels=self.tcn_hidden_channels,
            tcn_kernel_size=self.tcn_kernel_size,
            tcn_dilations=self.tcn_dilations,
            fc_layers=self.fc_layers,
            fc_units=self.fc_units,
            seed=self.seed,
        )

    def GetTrainingConfig(self) -> TrainingConfig:
        return TrainingConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=self.batch_size,
            patience=self.patience,
            seed=self.seed,
            shuffle=self.shuffle,
        )


def _GetParsers() -> Dict[str, Callable[[str], Any]]:
    return {a.name: a.metadata["parse"] for a in attr.fields(RunConfig)}


def LoadRunConfig(path: PathLike) -> RunConfig:
    """
    :raises ParseError:
        If the file does not exist.

    :raises ConfigurationError:
        On malformed lines, unknown or repeated keys and invalid values (naming the key and line).
    """
    path = Path(path)
    if not path.is_file():
        raise ParseError(path, "file not found")

    parsers = _GetParsers()
    values: Dict[str, Any] = {}
    for line_number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{path}, line {line_number}"
        key, sep, text = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigurationError(f"{where}: expected 'key = value', got {line!r}")
        if key not in parsers:
            raise ConfigurationError(f"{where}: unknown key {key!r}")
        if key in values:
            raise ConfigurationError(f"{where}: key {key!r} given more than once")
        try:
            values[key] = parsers[key](text.strip())
        except ValueError as e:
            raise ConfigurationError(f"{where}: invalid value for {key}: {e}") from None
    return RunConfig(**values)


def _FormatValue(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return FormatFloat(value)
    if isinstance(value, tuple):
        return ", ".join(_FormatValue(v) for v in value)
    return str(value)


def DumpRunConfig(config: RunConfig, path: PathLike) -> None:
    """
    Writes every key, defaults included, in a form `LoadRunConfig` reads back to an equal config.
    """
    lines = ["# nftcast resolved run configuration"]
    for a in attr.fields(RunConfig):
        lines.append(f"{a.name} = {_FormatValue(getattr(config, a.name))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
