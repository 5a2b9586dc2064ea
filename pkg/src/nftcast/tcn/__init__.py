"""
Dilated causal temporal convolution network used as the trunk of every block.
"""

from ._tcn import CausalConv1d
from ._tcn import ConvLayerParams
from ._tcn import InitializeConvLayer
from ._tcn import InitializeTcn
from ._tcn import ReceptiveField
from ._tcn import ResidualUnitParams
from ._tcn import TCNConfig
from ._tcn import TcnForward
from ._tcn import TemporalConvNet

__all__ = [
    "CausalConv1d",
    "ConvLayerParams",
    "InitializeConvLayer",
    "InitializeTcn",
    "ReceptiveField",
    "ResidualUnitParams",
    "TCNConfig",
    "TcnForward",
    "TemporalConvNet",
]
