"""
MSE loss, the Adam optimizer, the training loop and split evaluation.
"""

from ._optim import Adam
from ._optim import MseLoss
from ._trainer import EVAL_BATCH_SIZE
from ._trainer import EpochRecord
from ._trainer import Evaluate
from ._trainer import EvaluationResult
from ._trainer import LoadHistory
from ._trainer import Predict
from ._trainer import Train
from ._trainer import Trainer
from ._trainer import TrainingConfig
from ._trainer import TrainingHistory
from ._trainer import WriteHistory

__all__ = [
    "Adam",
    "EVAL_BATCH_SIZE",
    "EpochRecord",
    "Evaluate",
    "EvaluationResult",
    "LoadHistory",
    "MseLoss",
    "Predict",
    "Train",
    "Trainer",
    "TrainingConfig",
    "TrainingHistory",
    "WriteHistory",
]
