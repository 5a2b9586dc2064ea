from typing import Callable
from typing import List
from typing import Sequence

import attr
import logging
import numpy

from nftcast.exceptions import DomainError
from nftcast.exceptions import EvaluationError

from ._tensor import Backward
from ._tensor import Parameter
from ._tensor import RecordRectifierSigns
from ._tensor import Tensor
from ._tensor import ZeroGrads

__all__ = ["GradCheck", "GradCheckDetailed", "GradCheckResult"]

logger = logging.getLogger(__name__)

# Gradients smaller than this are compared in absolute rather than relative terms.
RELATIVE_ERROR_FLOOR = 1e-3


@attr.s(auto_attribs=True, frozen=True)
class GradCheckResult:
    """
    Outcome of comparing reverse-mode gradients against central finite differences.
    """

    max_relative_error: float
    checked: int
    skipped_at_kinks: int


def _Evaluate(f: Callable[[], Tensor]) -> float:
    value = f()
    if value.data.size != 1:
        raise EvaluationError(f"Function must be scalar-valued, got shape {list(value.shape)}")
    result = float(value.data.reshape(-1)[0])
    if not numpy.isfinite(result):
        raise EvaluationError(f"Function evaluated to {result}")
    return result


def _SameSigns(a: List[numpy.ndarray], b: List[numpy.ndarray]) -> bool:
    if len(a) != len(b):
        return False
    return all(x.shape == y.shape and numpy.array_equal(x, y) for x, y in zip(a, b))


def GradCheckDetailed(
    f: Callable[[], Tensor], params: Sequence[Parameter], step: float = 1e-5
) -> GradCheckResult:
    """
    Compares the gradient computed by `Backward` with the central difference
    `(f(w + h) - f(w - h)) / 2h`, entry by entry, over all given parameters.

    Entries whose difference stencil changes the sign pattern of any rectifier are skipped: the
    function is not differentiable between the two evaluation points.

    :param f:
        Scalar-valued function of the parameters (closing over them).

    :param params:
        Parameters to perturb. Their values are restored afterwards; their grads hold the
        analytic gradient on return.

    :param step:
        Finite-difference step h.

    :raises EvaluationError:
        If f is not finite at some evaluated point.
    """
    if step <= 0:
        raise DomainError(f"Finite-difference step must be positive, got {step}")

    ZeroGrads(params)
    with RecordRectifierSigns() as base_signs:
        output = f()
    _Evaluate(lambda: output)
    Backward(output)

    max_error = 0.0
    checked = 0
    skipped = 0
    for param in params:
        values = param.value.reshape(-1)
        analytic = param.grad.reshape(-1).copy()
        for i in range(values.size):
            original = values[i]
            try:
                values[i] = original + step
                with RecordRectifierSigns() as plus_signs:
                    f_plus = _Evaluate(f)
                values[i] = original - step
                with RecordRectifierSigns() as minus_signs:
                    f_minus = _Evaluate(f)
            finally:
                values[i] = original

            if not (_SameSigns(base_signs, plus_signs) and _SameSigns(base_signs, minus_signs)):
                skipped += 1
                continue

            numeric = (f_plus - f_minus) / (2.0 * step)
            scale = max(abs(analytic[i]), abs(numeric), RELATIVE_ERROR_FLOOR)
            max_error = max(max_error, abs(analytic[i] - numeric) / scale)
            checked += 1

    if skipped:
        logger.debug("Gradient check skipped %d entries at rectifier kinks", skipped)
    return GradCheckResult(max_relative_error=max_error, checked=checked, skipped_at_kinks=skipped)


def GradCheck(
    f: Callable[[], Tensor], params: Sequence[Parameter], step: float = 1e-5
) -> float:
    """
    :returns:
        The maximum relative error between analytic and finite-difference gradients.

    .. seealso:: :func:`GradCheckDetailed`
    """
    return GradCheckDetailed(f, params, step).max_relative_error
