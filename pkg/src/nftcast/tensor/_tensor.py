"""
Dense float64 tensors with a recorded reverse-mode gradient tape.

Every operation computes its value eagerly with numpy and, when any input requires gradients,
records its inputs together with a backward function. `Backward` then walks the recorded graph
in reverse topological order and accumulates gradients into the `Parameter` leaves.
"""

from typing import Any
from typing import Callable
from typing import Dict
from typing import Iterable
from typing import Iterator
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import contextlib
import numpy

from nftcast.exceptions import DimensionError
from nftcast.exceptions import EvaluationError

__all__ = [
    "Add",
    "AsTensor",
    "Backward",
    "BatchedMatMul",
    "GetItem",
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

MAX_RANK = 4

BackwardFunc = Callable[[numpy.ndarray], Sequence[Optional[numpy.ndarray]]]
TensorLike = Union["Tensor", numpy.ndarray, float, Sequence[Any]]

# Stack of active sign recorders (see RecordRectifierSigns).
_sign_recorders: List[List[numpy.ndarray]] = []

# Depth of nested NoRecording blocks.
_recording_paused = 0


class Tensor:
    """
    A shaped array of 64-bit reals stored row-major (C order).

    Tensors created by operations are immutable: their data array is flagged read-only. Only
    `Parameter` exposes a writable array, which is mutated by the optimizer.

    :ivar _parents:
        Inputs of the operation that produced this tensor (empty for leaves or when no input
        requires gradients).

    :ivar _backward:
        Maps the gradient of this tensor to the gradients of each parent.
    """

    __slots__ = ("_data", "_parents", "_backward", "_requires_grad", "__weakref__")

    def __init__(
        self,
        data: Any,
        parents: Tuple["Tensor", ...] = (),
        backward: Optional[BackwardFunc] = None,
        _writable: bool = False,
    ) -> None:
        array = numpy.array(data, dtype=numpy.float64, order="C")
        if array.ndim > MAX_RANK:
            raise DimensionError("Tensor", array.shape, detail=f"rank above {MAX_RANK}")
        if not numpy.isfinite(array).all():
            raise EvaluationError(f"Tensor of shape {list(array.shape)} has non-finite entries")
        array.flags.writeable = _writable
        self._data = array
        self._parents = parents
        self._backward = backward
        self._requires_grad = bool(parents) and backward is not None

    # Data -----------------------------------------------------------------------------------------
    def GetData(self) -> numpy.ndarray:
        """
        :returns:
            The underlying array (read-only unless this is a Parameter).
        """
        return self._data

    data = property(GetData)

    def GetShape(self) -> Tuple[int, ...]:
        return tuple(self._data.shape)

    shape = property(GetShape)

    def GetRank(self) -> int:
        return self._data.ndim

    rank = property(GetRank)

    def RequiresGrad(self) -> bool:
        return self._requires_grad

    def Item(self) -> float:
        """
        :returns:
            The single value of a tensor with one entry.
        """
        if self._data.size != 1:
            raise DimensionError("Item", self.shape, detail="expected a single entry")
        return float(self._data.reshape(-1)[0])

    # Operators ------------------------------------------------------------------------------------
    def __add__(self, other: TensorLike) -> "Tensor":
        return Add(self, other)

    def __radd__(self, other: TensorLike) -> "Tensor":
        return Add(other, self)

    def __sub__(self, other: TensorLike) -> "Tensor":
        return Subtract(self, other)

    def __rsub__(self, other: TensorLike) -> "Tensor":
        return Subtract(other, self)

    def __mul__(self, other: TensorLike) -> "Tensor":
        return Multiply(self, other)

    def __rmul__(self, other: TensorLike) -> "Tensor":
        return Multiply(other, self)

    def __neg__(self) -> "Tensor":
        return Multiply(self, -1.0)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        if self.rank == 2 and AsTensor(other).rank == 2:
            return MatMul(self, other)
        return BatchedMatMul(self, other)

    def __getitem__(self, index: Any) -> "Tensor":
        return GetItem(self, index)

    def __repr__(self) -> str:
        return f"Tensor(shape={list(self.shape)}, data={self._data.tolist()!r})"


class Parameter(Tensor):
    """
    A learnable tensor. Its gradient has the same shape as its value and is accumulated by
    `Backward`.

    :ivar id:
        Unique identifier, used to name the parameter in checkpoints.

    :ivar grad:
        Gradient array, same shape as the value.
    """

    __slots__ = ("id", "grad")

    def __init__(self, id: str, value: Any) -> None:
        Tensor.__init__(self, value, _writable=True)
        self._requires_grad = True
        self.id = id
        self.grad = numpy.zeros_like(self._data)

    def GetValue(self) -> numpy.ndarray:
        """
        :returns:
            The writable value array.
        """
        return self._data

    value = property(GetValue)

    def SetValue(self, value: Any) -> None:
        """
        Overwrites the value in place, keeping the shape.

        :raises DimensionError:
            If the shape differs.
        """
        array = numpy.asarray(value, dtype=numpy.float64)
        if array.shape != self._data.shape:
            raise DimensionError(f"Parameter {self.id}", self._data.shape, array.shape)
        self._data[...] = array

    def __repr__(self) -> str:
        return f"Parameter({self.id!r}, shape={list(self.shape)})"


def ZeroGrads(params: Iterable[Parameter]) -> None:
    """
    Resets the gradient of every given parameter to exactly 0.
    """
    for param in params:
        param.grad[...] = 0.0


def AsTensor(value: TensorLike) -> Tensor:
    """
    :returns:
        The value itself if it is a Tensor, otherwise a new constant tensor.
    """
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def RecordOperation(
    data: numpy.ndarray, parents: Sequence[Tensor], backward: BackwardFunc
) -> Tensor:
    """
    Creates the result of an operation, recording it on the tape only when some parent requires
    gradients. Used to define operations outside this module (e.g.: causal convolutions).

    :param data:
        The computed value.

    :param parents:
        The operation inputs, in the order `backward` returns their gradients.

    :param backward:
        Receives the gradient of the result and returns one gradient (or None) per parent.
    """
    if _recording_paused == 0 and any(p.RequiresGrad() for p in parents):
        return Tensor(data, tuple(parents), backward)
    return Tensor(data)


@contextlib.contextmanager
def NoRecording() -> Iterator[None]:
    """
    Context manager under which operations compute their values without recording anything on
    the tape: their results are constants, even when computed from parameters.
    """
    global _recording_paused
    _recording_paused += 1
    try:
        yield
    finally:
        _recording_paused -= 1


@contextlib.contextmanager
def RecordRectifierSigns() -> Iterator[List[numpy.ndarray]]:
    """
    Context manager collecting, in evaluation order, the sign pattern (`input > 0`) of every
    `Relu` evaluated inside the block. Used by gradient checks to detect kink crossings.
    """
    signs: List[numpy.ndarray] = []
    _sign_recorders.append(signs)
    try:
        yield signs
    finally:
        _sign_recorders.remove(signs)


def _Unbroadcast(grad: numpy.ndarray, shape: Tuple[int, ...]) -> numpy.ndarray:
    """
    Sums `grad` over the axes that were broadcast to produce it from an operand of `shape`.
    """
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _BroadcastShape(operation: str, a: Tensor, b: Tensor) -> None:
    try:
        numpy.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(operation, a.shape, b.shape)


# Elementwise --------------------------------------------------------------------------------------
def Add(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = AsTensor(a), AsTensor(b)
    _BroadcastShape("Add", a, b)
    a_shape, b_shape = a.shape, b.shape

    def AddBackward(grad: numpy.ndarray) -> Sequence[numpy.ndarray]:
        return _Unbroadcast(grad, a_shape), _Unbroadcast(grad, b_shape)

    return RecordOperation(a.data + b.data, (a, b), AddBackward)


def Subtract(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = AsTensor(a), AsTensor(b)
    _BroadcastShape("Subtract", a, b)
    a_shape, b_shape = a.shape, b.shape

    def SubtractBackward(grad: numpy.ndarray) -> Sequence[numpy.ndarray]:
        return _Unbroadcast(grad, a_shape), _Unbroadcast(-grad, b_shape)

    return RecordOperation(a.data - b.data, (a, b), SubtractBackward)


def Multiply(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = AsTensor(a), AsTensor(b)
    _BroadcastShape("Multiply", a, b)
    a_data, b_data = a.data, b.data

    def MultiplyBackward(grad: numpy.ndarray) -> Sequence[numpy.ndarray]:
        return _Unbroadcast(grad * b_data, a_data.shape), _Unbroadcast(grad * a_data, b_data.shape)

    return RecordOperation(a_data * b_data, (a, b), MultiplyBackward)


def Relu(a: TensorLike) -> Tensor:
    """
    Rectifier, max(x, 0). The derivative at exactly 0 is taken as 0.
    """
    a = AsTensor(a)
    active = a.data > 0.0
    for recorder in _sign_recorders:
        recorder.append(active)

    def ReluBackward(grad: numpy.ndarray) -> Sequence[numpy.ndarray]:
        return (grad * active,)

    return RecordOperation(numpy.where(active, a.data, 0.0), (a,), ReluBackward)


# Reductions ---------------------------------------------------------------------------------------
def Sum(a: TensorLike) -> Tensor:
    """
    Sum of all entries, as a tensor of shape [].
    """
    a = AsTensor(a)
    shape = a.shape

    def SumBackward(grad: numpy.ndarray) -> Sequence[numpy.ndarray]:
        return (numpy.broadcast_to(grad, shape).copy(),)

    return RecordOperation(numpy.array(a.data.sum()), (a,), SumBackward)


def Mean(a: TensorLike) -> Tensor:
    """
    Mean of all entries, as a tensor of shape [].
    """
    a = AsTensor(a)
    shape = a.shape
    count = a.data.size
    if count == 0:
        raise DimensionError("Mean", shape, detail="empty tensor")

    def MeanBackward(grad: numpy.ndarray) -> Sequence[numpy.ndarray]:
        return (numpy.broadcast_to(grad / count, shape).copy(),)

    return RecordOperation(numpy.array(a.data.mean()), (a,), MeanBackward)


# Shape manipulation -------------------------------------------------------------------------------
def Reshape(a: TensorLike, shape: Sequence[int]) -> Tensor:
    a = AsTensor(a)
    original = a.shape
    try:
        data = a.data.reshape(tuple(shape))
    except ValueError:
        raise DimensionError("Reshape", original, tuple(shape))

    def ReshapeBackward(grad: numpy.ndarray) -> Sequence[numpy.ndarray]:
        return (grad.reshape(original),)

    return RecordOperation(data, (a,), ReshapeBackward)


def Transpose(a: TensorLike, axes: Optional[Sequence[int]] = None) -> Tensor:
    """
    Permutes the axes of `a`. Without `axes`, swaps the last two axes.
    """
    a = AsTensor(a)
    if axes is None:
        if a.rank < 2:
            raise DimensionError("Transpose", a.shape, detail="rank below 2")
        axes = list(range(a.rank - 2)) + [a.rank - 1, a.rank - 2]
    axes = tuple(axes)
    if sorted(axes) != list(range(a.rank)):
        raise DimensionError("Transpose", a.shape, detail=f"invalid axes {axes}")
    inverse = tuple(numpy.argsort(axes))

    def TransposeBackward(grad: numpy.ndarray) -> Sequence[numpy.ndarray]:
        return (grad.transpose(inverse),)

    return RecordOperation(a.data.transpose(axes), (a,), TransposeBackward)


def GetItem(a: TensorLike, index: Any) -> Tensor:
    """
    Basic numpy indexing (integers and slices).
    """
    a = AsTensor(a)
    shape = a.shape

    def GetItemBackward(grad: numpy.ndarray) -> Sequence[numpy.ndarray]:
        result = numpy.zeros(shape)
        result[index] = grad
        return (result,)

    return RecordOperation(a.data[index], (a,), GetItemBackward)


# Products -----------------------------------------------------------------------------------------
def MatMul(a: TensorLike, b: TensorLike) -> Tensor:
    """
    Matrix product of two rank-2 tensors.

    :raises DimensionError:
        If the ranks are not 2 or the inner dimensions differ.
    """
    a, b = AsTensor(a), AsTensor(b)
    if a.rank != 2 or b.rank != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError("MatMul", a.shape, b.shape)
    a_data, b_data = a.data, b.data

    def MatMulBackward(grad: numpy.ndarray) -> Sequence[numpy.ndarray]:
        return grad @ b_data.T, a_data.T @ grad

    return RecordOperation(a_data @ b_data, (a, b), MatMulBackward)


def BatchedMatMul(a: TensorLike, b: TensorLike) -> Tensor:
    """
    Per-batch matrix product. At least one operand is rank-3 `[batch × n × k]`; a rank-2
    operand is broadcast across the batch.

    :raises DimensionError:
        If the trailing two dimensions do not conform or batch sizes differ.
    """
    a, b = AsTensor(a), AsTensor(b)
    ranks_ok = {a.rank, b.rank} <= {2, 3} and 3 in (a.rank, b.rank)
    if not ranks_ok or a.shape[-1] != b.shape[-2]:
        raise DimensionError("BatchedMatMul", a.shape, b.shape)
    if a.rank == 3 and b.rank == 3 and a.shape[0] != b.shape[0]:
        raise DimensionError("BatchedMatMul", a.shape, b.shape, detail="batch sizes differ")
    a_data, b_data = a.data, b.data

    def BatchedMatMulBackward(grad: numpy.ndarray) -> Sequence[numpy.ndarray]:
        grad_a = grad @ numpy.swapaxes(b_data, -1, -2)
        grad_b = numpy.swapaxes(a_data, -1, -2) @ grad
        if a_data.ndim == 2:
            grad_a = grad_a.sum(axis=0)
        if b_data.ndim == 2:
            grad_b = grad_b.sum(axis=0)
        return grad_a, grad_b

    return RecordOperation(numpy.matmul(a_data, b_data), (a, b), BatchedMatMulBackward)


# Backward pass ------------------------------------------------------------------------------------
def _TopologicalOrder(root: Tensor) -> List[Tensor]:
    order: List[Tensor] = []
    visited = set()
    stack: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.RequiresGrad() and id(parent) not in visited:
                stack.append((parent, False))
    return order


def Backward(output: Tensor, grad: Optional[numpy.ndarray] = None) -> None:
    """
    Accumulates d(output)/d(parameter) into `grad` of every Parameter reachable from `output`.

    :param output:
        Usually a scalar loss.

    :param grad:
        Seed gradient; defaults to ones (i.e. differentiates the sum of `output`).
    """
    if not output.RequiresGrad():
        return

    seed = numpy.ones(output.shape) if grad is None else numpy.asarray(grad, dtype=numpy.float64)
    if seed.shape != output.shape:
        raise DimensionError("Backward", output.shape, seed.shape)

    grads: Dict[int, numpy.ndarray] = {id(output): seed}
    for node in reversed(_TopologicalOrder(output)):
        node_grad = grads.pop(id(node), None)
        if node_grad is None:
            continue
        if isinstance(node, Parameter):
            node.grad += node_grad
        if node._backward is None:
            continue
        for parent, parent_grad in zip(node._parents, node._backward(node_grad)):
            if parent_grad is None or not parent.RequiresGrad():
                continue
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + parent_grad
            else:
                grads[key] = parent_grad
