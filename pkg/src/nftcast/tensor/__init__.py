"""
Minimal dense numeric core: float64 tensors, matrix products and reverse-mode gradients.

    >>> from nftcast.tensor import MatMul, Tensor
    >>> MatMul(Tensor([[1.0, 2.0]]), Tensor([[3.0], [4.0]])).data.tolist()
    [[11.0]]
"""

from ._gradcheck import GradCheck
from ._gradcheck import GradCheckDetailed
from ._gradcheck import GradCheckResult
from ._tensor import Add
from ._tensor import AsTensor
from ._tensor import Backward
from ._tensor import BatchedMatMul
from ._tensor import GetItem
from ._tensor import MatMul
from ._tensor import Mean
from ._tensor import Multiply
from ._tensor import NoRecording
from ._tensor import Parameter
from ._tensor import RecordOperation
from ._tensor import RecordRectifierSigns
from ._tensor import Relu
from ._tensor import Reshape
from ._tensor import Subtract
from ._tensor import Sum
from ._tensor import Tensor
from ._tensor import Transpose
from ._tensor import ZeroGrads

__all__ = [
    "Add",
    "AsTensor",
    "Backward",
    "BatchedMatMul",
    "GetItem",
    "GradCheck",
    "GradCheckDetailed",
    "GradCheckResult",
    "MatMul",
    "Mean",
    "Multiply",
    "NoRecording",
    "Parameter",
    "RecordOperation",
    "RecordRectifierSigns",
    "Relu",
    "Reshape",
    "Subtract",
    "Sum",
    "Tensor",
    "Transpose",
    "ZeroGrads",
]
