"""
Diferenciación automática reversa mínima sobre tensores densos float64.

Estructura:
    tensor.py: Tensor, Tape, primitivas y registro BACKWARD_RULES
    gradcheck.py: verificación por diferencias centrales
"""

from autodiff.tensor import (
    BACKWARD_RULES,
    Tape,
    Tensor,
    add,
    backward,
    clip,
    concat_rows,
    exp,
    huber,
    log,
    log_softmax_rows,
    matmul,
    max_over_axis,
    mean,
    multiply,
    reciprocal,
    relu,
    scale,
    scale_rows,
    slice_rows,
    softmax_rows,
    sqrt,
    subtract,
    sum_,
    take_rows,
)
from autodiff.gradcheck import grad_check

__all__ = [
    "BACKWARD_RULES",
    "Tape",
    "Tensor",
    "add",
    "backward",
    "clip",
    "concat_rows",
    "exp",
    "grad_check",
    "huber",
    "log",
    "log_softmax_rows",
    "matmul",
    "max_over_axis",
    "mean",
    "multiply",
    "reciprocal",
    "relu",
    "scale",
    "scale_rows",
    "slice_rows",
    "softmax_rows",
    "sqrt",
    "subtract",
    "sum_",
    "take_rows",
]
