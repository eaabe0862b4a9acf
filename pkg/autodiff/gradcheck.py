"""
Verificación de gradientes por diferencias centrales.

    error = max_i |a_i − b_i| / max(1e-8, |a_i| + |b_i|)

donde a es el gradiente de la cinta y b = (f(x + h·e_i) − f(x − h·e_i)) / 2h.
"""

import numpy as np

import config
from autodiff.tensor import Tape, Tensor
from errors import InvalidInputError


def _evaluate(function, values: np.ndarray) -> float:
    return function(Tensor(values)).item()


def analytic_gradient(function, values) -> np.ndarray:
    """Gradiente de la cinta de `function` (tensor → escalar) en `values`."""
    leaf = Tensor(values, requires_grad=True)
    with Tape() as tape:
        out = function(leaf)
    if out.size != 1:
        raise InvalidInputError(f"La función debe devolver un escalar, shape={out.shape}")
    if not out.requires_grad:
        # f no depende del punto
        return np.zeros_like(leaf.values)
    tape.backward(out)
    return np.zeros_like(leaf.values) if leaf.grad is None else leaf.grad


def numeric_gradient(function, values, step: float = config.GRADCHECK_STEP) -> np.ndarray:
    base = np.array(values, dtype=np.float64)
    grad = np.zeros_like(base)
    for i in range(base.size):
        plus = base.copy()
        minus = base.copy()
        plus.flat[i] += step
        minus.flat[i] -= step
        grad.flat[i] = (_evaluate(function, plus) - _evaluate(function, minus)) / (2.0 * step)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    a = np.asarray(analytic, dtype=np.float64)
    b = np.asarray(numeric, dtype=np.float64)
    if a.size == 0:
        return 0.0
    err = np.abs(a - b) / np.maximum(1e-8, np.abs(a) + np.abs(b))
    return float(err.max())


def grad_check(function, point, step: float = config.GRADCHECK_STEP) -> float:
    """
    Compara el gradiente reverso con diferencias centrales.

    Args:
        function: tensor → tensor escalar, pura
        point: Tensor o array donde evaluar
        step: paso h de las diferencias (> 0)

    Returns:
        float: máximo error relativo sobre todas las coordenadas
    """
    if not step > 0:
        raise InvalidInputError(f"step debe ser > 0 (recibido {step})")
    values = point.values if isinstance(point, Tensor) else point
    values = np.array(values, dtype=np.float64)
    return relative_error(
        analytic_gradient(function, values),
        numeric_gradient(function, values, step),
    )
