"""
Training loop with validation-based model selection, and evaluation of a model over a split.

Losses and reported MSE values are on the standardized scale; evaluation additionally reports
raw-scale values when the dataset carries its standardization statistics.
"""

import logging
from pathlib import Path
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import attr
import numpy
from oop_ext.foundation import callback

from nftcast.basic.format_float import FloatFromString
from nftcast.basic.format_float import FormatFloat
from nftcast.data import Destandardize
from nftcast.data import Split
from nftcast.data import Window
from nftcast.data import WindowedDataset
from nftcast.exceptions import ConfigurationError
from nftcast.exceptions import DivergenceError
from nftcast.exceptions import EvaluationError
from nftcast.exceptions import ParseError
from nftcast.model import ModelForward
from nftcast.model import NFTModel
from nftcast.tensor import Backward
from nftcast.tensor import NoRecording
from nftcast.tensor import Tensor
from nftcast.tensor import ZeroGrads

from ._optim import Adam
from ._optim import MseLoss

__all__ = [
    "EVAL_BATCH_SIZE",
    "EpochRecord",
    "EvaluationResult",
    "Evaluate",
    "LoadHistory",
    "Predict",
    "Train",
    "Trainer",
    "TrainingConfig",
    "TrainingHistory",
    "WriteHistory",
]

logger = logging.getLogger(__name__)

# Fixed so that evaluating the same model twice gives bit-identical numbers.
EVAL_BATCH_SIZE = 256

HISTORY_HEADER = "epoch,train_mse,val_mse"


def _Positive(instance: object, attribute: "attr.Attribute[float]", value: float) -> None:
    if not value > 0:
        raise ConfigurationError(f"{attribute.name} must be positive, got {value}")


def _NonNegative(instance: object, attribute: "attr.Attribute[int]", value: int) -> None:
    if value < 0:
        raise ConfigurationError(f"{attribute.name} must not be negative, got {value}")


def _AtLeastOne(instance: object, attribute: "attr.Attribute[int]", value: int) -> None:
    if value < 1:
        raise ConfigurationError(f"{attribute.name} must be at least 1, got {value}")


@attr.s(auto_attribs=True, frozen=True)
class TrainingConfig:
    """
    :ivar patience:
        Training stops after this many epochs without a validation improvement.

    :ivar seed:
        Seeds the shuffling of training windows.
    """

    learning_rate: float = attr.ib(default=1e-3, validator=_Positive)
    epochs: int = attr.ib(default=200, validator=_NonNegative)
    batch_size: int = attr.ib(default=32, validator=_AtLeastOne)
    patience: int = attr.ib(default=20, validator=_AtLeastOne)
    seed: int = 0
    shuffle: bool = True


@attr.s(auto_attribs=True, frozen=True)
class EpochRecord:

    epoch: int
    train_mse: float
    val_mse: float


@attr.s(auto_attribs=True)
class TrainingHistory:
    """
    :ivar best_epoch:
        1-based epoch with the lowest validation MSE (the first one on ties), None if no epoch
        ran.
    """

    train_mse: List[float] = attr.ib(factory=list)
    val_mse: List[float] = attr.ib(factory=list)
    best_epoch: Optional[int] = None

    def GetEpochCount(self) -> int:
        return len(self.train_mse)

    def GetBestValMse(self) -> Optional[float]:
        if self.best_epoch is None:
            return None
        return self.val_mse[self.best_epoch - 1]

    def Append(self, record: EpochRecord) -> None:
        self.train_mse.append(record.train_mse)
        self.val_mse.append(record.val_mse)
        best = self.GetBestValMse()
        if best is None or record.val_mse < best:
            self.best_epoch = record.epoch

    def GetRecords(self) -> List[EpochRecord]:
        return [
            EpochRecord(i + 1, t, v) for i, (t, v) in enumerate(zip(self.train_mse, self.val_mse))
        ]


@attr.s(auto_attribs=True, frozen=True, eq=False)
class EvaluationResult:
    """
    Squared errors of a model over one split.

    :ivar per_window:
        MSE of each window, in split order.

    :ivar per_step:
        MSE at each forecast step 1..H, averaged over windows and variables.

    :ivar raw_per_window:
        As `per_window`, on the raw scale; None when the dataset has no statistics.
    """

    split: str
    per_window: numpy.ndarray
    per_step: numpy.ndarray
    raw_per_window: Optional[numpy.ndarray] = None
    raw_per_step: Optional[numpy.ndarray] = None

    def GetAggregate(self) -> float:
        return float(self.per_window.mean())

    aggregate = property(GetAggregate)

    def GetRawAggregate(self) -> Optional[float]:
        if self.raw_per_window is None:
            return None
        return float(self.raw_per_window.mean())

    raw_aggregate = property(GetRawAggregate)


def Predict(model: NFTModel, x: numpy.ndarray, batch_size: int = EVAL_BATCH_SIZE) -> numpy.ndarray:
    """
    :param x:
        Input windows [n × M × t].

    :returns:
        Forecasts [n × M × H].
    """
    with NoRecording():
        outputs = [
            ModelForward(Tensor(x[begin : begin + batch_size]), model).total.data
            for begin in range(0, len(x), batch_size)
        ]
    return numpy.concatenate(outputs, axis=0)


def _GetSplitWindows(data: WindowedDataset, split: Split) -> List[Window]:
    windows = data.GetWindows(split)
    if not windows:
        raise ConfigurationError(f"The {split} split has no window")
    return windows


def Evaluate(
    model: NFTModel, data: WindowedDataset, split: Split, batch_size: int = EVAL_BATCH_SIZE
) -> EvaluationResult:
    """
    :raises ConfigurationError:
        If the split has no window.
    """
    x, y = data.GetBatch(_GetSplitWindows(data, split))
    pred = Predict(model, x, batch_size)
    squared = (pred - y) ** 2
    raw_per_window = raw_per_step = None
    if data.stats is not None:
        raw_squared = (Destandardize(pred, data.stats) - Destandardize(y, data.stats)) ** 2
        raw_per_window = raw_squared.mean(axis=(1, 2))
        raw_per_step = raw_squared.mean(axis=(0, 1))
    return EvaluationResult(
        split=split,
        per_window=squared.mean(axis=(1, 2)),
        per_step=squared.mean(axis=(0, 1)),
        raw_per_window=raw_per_window,
        raw_per_step=raw_per_step,
    )


class Trainer:
    """
    Mini-batch Adam over the training windows, keeping the parameters of the best validation
    epoch.

    :ivar on_epoch_end:
        Called with an `EpochRecord` after every epoch.
    """

    def __init__(self, model: NFTModel, config: TrainingConfig) -> None:
        self.model = model
        self.config = config
        self.optimizer = Adam(config.learning_rate)
        self.on_epoch_end = callback.Callback1[EpochRecord]()
        self.on_epoch_end.Register(self._LogEpoch)

    def _LogEpoch(self, record: EpochRecord) -> None:
        logger.info(
            "Epoch %d: train mse %s, val mse %s",
            record.epoch,
            FormatFloat(record.train_mse, "%.6g"),
            FormatFloat(record.val_mse, "%.6g"),
        )

    def Step(self, x: numpy.ndarray, y: numpy.ndarray) -> float:
        """
        One optimizer step on a single batch.

        :returns:
            The batch loss before the step.
        """
        params = self.model.GetParameters()
        ZeroGrads(params)
        loss = MseLoss(ModelForward(Tensor(x), self.model).total, Tensor(y))
        Backward(loss)
        self.optimizer.Step(params)
        return loss.Item()

    def RunEpoch(
        self, data: WindowedDataset, windows: Sequence[Window], rng: numpy.random.Generator
    ) -> float:
        """
        :returns:
            Mean training loss over the windows of the epoch.
        """
        if self.config.shuffle:
            windows = [windows[i] for i in rng.permutation(len(windows))]
        total = 0.0
        for x, y in data.IterBatches(windows, self.config.batch_size):
            total += self.Step(x, y) * len(x)
        return total / len(windows)

    def Train(self, data: WindowedDataset) -> TrainingHistory:
        """
        :raises ConfigurationError:
            If the train or validation split has no window.

        :raises DivergenceError:
            If the loss stops being finite.
        """
        config = self.config
        train_windows = _GetSplitWindows(data, "train")
        _GetSplitWindows(data, "val")
        self.model.CheckCompatible(data.variables, data.lookback, data.horizon)

        rng = numpy.random.default_rng(config.seed)
        history = TrainingHistory()
        best_values = None
        for epoch in range(1, config.epochs + 1):
            try:
                train_mse = self.RunEpoch(data, train_windows, rng)
                val_mse = Evaluate(self.model, data, "val").aggregate
            except (EvaluationError, FloatingPointError):
                raise DivergenceError(epoch, float("nan"))
            if not (numpy.isfinite(train_mse) and numpy.isfinite(val_mse)):
                loss = train_mse if not numpy.isfinite(train_mse) else val_mse
                raise DivergenceError(epoch, loss)

            record = EpochRecord(epoch, train_mse, val_mse)
            history.Append(record)
            if history.best_epoch == epoch:
                best_values = self.model.GetParameterValues()
            self.on_epoch_end(record)

            assert history.best_epoch is not None
            if epoch - history.best_epoch >= config.patience:
                logger.info(
                    "Stopping at epoch %d: no improvement since epoch %d", epoch, history.best_epoch
                )
                break

        if best_values is not None:
            self.model.SetParameterValues(best_values)
        return history


def Train(
    model: NFTModel, data: WindowedDataset, config: TrainingConfig
) -> Tuple[NFTModel, TrainingHistory]:
    """
    Trains `model` in place.

    :returns:
        The model, holding the parameters of its best validation epoch, and the history.
    """
    history = Trainer(model, config).Train(data)
    return model, history


def WriteHistory(history: TrainingHistory, path: Union[str, Path]) -> None:
    """
    One `epoch,train_mse,val_mse` row per epoch, after a header row.
    """
    lines = [HISTORY_HEADER]
    for record in history.GetRecords():
        lines.append(
            f"{record.epoch},{FormatFloat(record.train_mse)},{FormatFloat(record.val_mse)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def LoadHistory(path: Union[str, Path]) -> TrainingHistory:
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines or lines[0] != HISTORY_HEADER:
        raise ParseError(path, f"expected header {HISTORY_HEADER!r}", line=1)
    history = TrainingHistory()
    for line_number, line in enumerate(lines[1:], start=2):
        try:
            epoch_str, train_str, val_str = line.split(",")
            record = EpochRecord(
                int(epoch_str), FloatFromString(train_str), FloatFromString(val_str)
            )
        except ValueError:
            raise ParseError(path, f"malformed row {line!r}", line=line_number)
        if record.epoch != history.GetEpochCount() + 1:
            raise ParseError(path, f"epochs out of sequence at {record.epoch}", line=line_number)
        history.Append(record)
    return history
