from typing import Dict
from typing import Sequence

import numpy

from nftcast.exceptions import DimensionError
from nftcast.exceptions import DomainError
from nftcast.tensor import AsTensor
from nftcast.tensor import Mean
from nftcast.tensor import Multiply
from nftcast.tensor import Parameter
from nftcast.tensor import Subtract
from nftcast.tensor import Tensor

__all__ = ["Adam", "MseLoss"]


def MseLoss(pred: Tensor, target: Tensor) -> Tensor:
    """
    Mean over every entry of the squared difference.

    :raises DimensionError:
        If the shapes differ (no broadcasting).
    """
    pred = AsTensor(pred)
    target = AsTensor(target)
    if pred.shape != target.shape:
        raise DimensionError("MseLoss", pred.shape, target.shape)
    diff = Subtract(pred, target)
    return Mean(Multiply(diff, diff))


class Adam:
    """
    Adam with bias-corrected first and second moment estimates. Moments are kept per parameter id.
    """

    def __init__(
        self,
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ) -> None:
        if learning_rate <= 0:
            raise DomainError(f"Learning rate must be positive, got {learning_rate}")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self._step = 0
        self._m: Dict[str, numpy.ndarray] = {}
        self._v: Dict[str, numpy.ndarray] = {}

    def GetStepCount(self) -> int:
        return self._step

    def Step(self, params: Sequence[Parameter]) -> None:
        """
        Updates every parameter in place from its accumulated gradient.
        """
        self._step += 1
        correction1 = 1.0 - self.beta1**self._step
        correction2 = 1.0 - self.beta2**self._step
        for param in params:
            grad = param.grad
            m = self._m.setdefault(param.id, numpy.zeros_like(grad))
            v = self._v.setdefault(param.id, numpy.zeros_like(grad))
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad * grad
            m_hat = m / correction1
            v_hat = v / correction2
            param.value[...] -= self.learning_rate * m_hat / (numpy.sqrt(v_hat) + self.epsilon)
