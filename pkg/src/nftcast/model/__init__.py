"""
The forecasting architecture: coefficient learners, basis blocks, doubly-residual stacks and
their checkpoint files.
"""

from ._blocks import BLOCK_KINDS
from ._blocks import BlockKind
from ._blocks import GenericBlock
from ._blocks import IBlock
from ._blocks import SeasonalityBlock
from ._blocks import TrendBlock
from ._checkpoint import CHECKPOINT_VERSION
from ._checkpoint import Checkpoint
from ._checkpoint import LoadCheckpoint
from ._checkpoint import SaveCheckpoint
from ._learners import AffineLayer
from ._learners import FcLearner
from ._learners import ICoefficientLearner
from ._learners import InitializeAffine
from ._learners import TcnLearner
from ._model import BuildModel
from ._model import DecomposeForecast
from ._model import ForecastDecomposition
from ._model import LearnerKind
from ._model import ModelConfig
from ._model import ModelForward
from ._model import NFTModel

__all__ = [
    "AffineLayer",
    "BLOCK_KINDS",
    "BlockKind",
    "BuildModel",
    "CHECKPOINT_VERSION",
    "Checkpoint",
    "DecomposeForecast",
    "FcLearner",
    "ForecastDecomposition",
    "GenericBlock",
    "IBlock",
    "ICoefficientLearner",
    "InitializeAffine",
    "LearnerKind",
    "LoadCheckpoint",
    "ModelConfig",
    "ModelForward",
    "NFTModel",
    "SaveCheckpoint",
    "SeasonalityBlock",
    "TcnLearner",
    "TrendBlock",
]
