"""
Diferenciación automática en modo reverso sobre tensores densos float64.

Modelo:
- Tensor: valores numpy float64 + flag requires_grad + grad opcional.
- Tape: registro ordenado de operaciones ejecutadas mientras la cinta
  está activa (`with Tape() as tape:`). Cada registro guarda entradas,
  salida y el nombre de la operación; la regla de backward se busca en
  BACKWARD_RULES por ese nombre al momento de retropropagar.
- Fuera de una cinta activa las operaciones no registran nada: la
  evaluación es pura y se puede usar desde varios hilos.

La cinta activa vive en un ContextVar: cada hilo (y cada contexto
asyncio) ve la suya, así que cintas distintas pueden correr en paralelo.

Broadcasting soportado: escalar con tensor y bias de fila (m, n) + (n,).
Cualquier otra combinación de shapes es un InvalidInputError.

Uso:
    x = Tensor(np.ones((2, 3)), requires_grad=True)
    with Tape() as tape:
        y = sum_(multiply(x, x))
    tape.backward(y)
    x.grad  # 2·x
"""

from contextvars import ContextVar
from dataclasses import dataclass, field
from numbers import Number

import numpy as np

from errors import AutodiffError, InvalidInputError

_ACTIVE_TAPE: ContextVar = ContextVar("vskd_active_tape", default=None)


class Tensor:
    """
    Valor denso n-dimensional.

    Attributes:
        values (np.ndarray): datos float64 en orden row-major
        requires_grad (bool): si participa del grafo de gradientes
        grad (np.ndarray | None): ∂salida/∂tensor tras backward (mismo shape)
        is_leaf (bool): False si lo produjo una operación registrada
    """

    __slots__ = ("values", "requires_grad", "grad", "is_leaf", "name", "_tape")

    # numpy delega en los operadores reflejados (ndarray + Tensor → Tensor)
    __array_ufunc__ = None

    def __init__(self, values, requires_grad: bool = False, name: str | None = None):
        self.values = np.array(values, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.is_leaf = True
        self.name = name
        self._tape = None

    @classmethod
    def _wrap(cls, values: np.ndarray) -> "Tensor":
        # Salida de operación: sin copia extra
        out = cls.__new__(cls)
        out.values = np.asarray(values, dtype=np.float64)
        out.requires_grad = False
        out.grad = None
        out.is_leaf = True
        out.name = None
        out._tape = None
        return out

    @property
    def shape(self) -> tuple:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def size(self) -> int:
        return int(self.values.size)

    def item(self) -> float:
        if self.values.size != 1:
            raise InvalidInputError(f"item() requiere un escalar, shape={self.shape}")
        return float(self.values.reshape(()))

    def numpy(self) -> np.ndarray:
        return self.values.copy()

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{label})"

    # --- Operadores ---

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return subtract(self, other)

    def __rsub__(self, other):
        return subtract(other, self)

    def __mul__(self, other):
        if isinstance(other, Number):
            return scale(self, float(other))
        return multiply(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if not isinstance(other, Number):
            raise InvalidInputError("Solo se admite división por escalares; usar reciprocal/scale_rows")
        return scale(self, 1.0 / float(other))

    def __neg__(self):
        return scale(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)


@dataclass
class TapeRecord:
    """Una operación ejecutada: nombre, entradas, salida y contexto guardado."""

    op: str
    inputs: tuple
    output: Tensor
    context: dict = field(default_factory=dict)


class Tape:
    """
    Registro ordenado de operaciones para un único paso de entrenamiento.

    Invariantes:
    - orden topológico: cada registro aparece después de los que
      producen sus entradas (se graba en orden de ejecución)
    - backward recorre cada registro exactamente una vez
    - una cinta solo puede retropropagarse una vez (reset() la reutiliza)
    """

    def __init__(self):
        self.records = []
        self._consumed = False
        self._token = None

    def __enter__(self):
        self._token = _ACTIVE_TAPE.set(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _ACTIVE_TAPE.reset(self._token)
        self._token = None
        return False

    def __len__(self):
        return len(self.records)

    def record(self, op: str, inputs: tuple, output: Tensor, **context):
        output.requires_grad = True
        output.is_leaf = False
        output._tape = self
        self.records.append(TapeRecord(op=op, inputs=inputs, output=output, context=context))

    def reset(self):
        """Vacía la cinta para poder grabar y retropropagar de nuevo."""
        self.records = []
        self._consumed = False

    def backward(self, output: Tensor):
        """
        Acumula ∂output/∂hoja en `.grad` de cada hoja con requires_grad.

        Raises:
            AutodiffError: Si output no es escalar, no salió de esta cinta,
                           o la cinta ya fue retropropagada
        """
        if self._consumed:
            raise AutodiffError("La cinta ya fue retropropagada; llamar reset() antes de reutilizarla")
        if output.size != 1:
            raise AutodiffError(f"backward requiere una salida escalar, shape={output.shape}")
        if output.is_leaf or output._tape is not self:
            raise AutodiffError("La salida no fue producida por esta cinta")

        grads = {id(output): np.ones_like(output.values)}
        leaves = {}

        for rec in reversed(self.records):
            upstream = grads.pop(id(rec.output), None)
            if upstream is None:
                continue
            rule = BACKWARD_RULES[rec.op]
            input_grads = rule(upstream, rec)
            for inp, g in zip(rec.inputs, input_grads):
                if g is None or not inp.requires_grad:
                    continue
                key = id(inp)
                if key in grads:
                    grads[key] = grads[key] + g
                else:
                    grads[key] = g
                if inp.is_leaf:
                    leaves[key] = inp

        for key, leaf in leaves.items():
            g = grads[key].reshape(leaf.shape)
            leaf.grad = g.copy() if leaf.grad is None else leaf.grad + g

        self._consumed = True


def backward(output: Tensor):
    """Retropropaga desde una salida escalar usando la cinta que la produjo."""
    if output.is_leaf or output._tape is None:
        raise AutodiffError("La salida no pertenece a ninguna cinta")
    output._tape.backward(output)


# =========================================================================
# HELPERS INTERNOS
# =========================================================================


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor._wrap(np.asarray(x, dtype=np.float64))


def _emit(op: str, inputs: tuple, values: np.ndarray, **context) -> Tensor:
    out = Tensor._wrap(values)
    tape = _ACTIVE_TAPE.get()
    if tape is not None and any(t.requires_grad for t in inputs):
        tape.record(op, inputs, out, **context)
    return out


def _check_broadcast(op: str, a: Tensor, b: Tensor):
    if a.shape == b.shape or a.size == 1 and a.ndim <= 1 or b.size == 1 and b.ndim <= 1:
        return
    if a.ndim == 2 and b.ndim == 1 and b.shape[0] == a.shape[1]:
        return
    if b.ndim == 2 and a.ndim == 1 and a.shape[0] == b.shape[1]:
        return
    raise InvalidInputError(f"{op}: shapes incompatibles {a.shape} y {b.shape}")


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    if g.shape == shape:
        return g
    if int(np.prod(shape, dtype=np.int64)) == 1:
        return np.asarray(g.sum()).reshape(shape)
    # bias de fila: (m, n) → (n,)
    return g.sum(axis=0).reshape(shape)


# =========================================================================
# PRIMITIVAS
# =========================================================================


def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast("add", a, b)
    return _emit("add", (a, b), a.values + b.values)


def subtract(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast("subtract", a, b)
    return _emit("subtract", (a, b), a.values - b.values)


def multiply(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast("multiply", a, b)
    return _emit("multiply", (a, b), a.values * b.values)


def scale(a, factor: float) -> Tensor:
    """Multiplica por una constante escalar (no diferenciable respecto de factor)."""
    a = _as_tensor(a)
    factor = float(factor)
    return _emit("scale", (a,), a.values * factor, factor=factor)


def reciprocal(a) -> Tensor:
    a = _as_tensor(a)
    return _emit("reciprocal", (a,), 1.0 / a.values)


def matmul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise InvalidInputError(f"matmul: shapes incompatibles {a.shape} @ {b.shape}")
    return _emit("matmul", (a, b), a.values @ b.values)


def relu(a) -> Tensor:
    a = _as_tensor(a)
    return _emit("relu", (a,), np.maximum(a.values, 0.0))


def log(a) -> Tensor:
    a = _as_tensor(a)
    return _emit("log", (a,), np.log(a.values))


def exp(a) -> Tensor:
    a = _as_tensor(a)
    return _emit("exp", (a,), np.exp(a.values))


def sqrt(a) -> Tensor:
    a = _as_tensor(a)
    return _emit("sqrt", (a,), np.sqrt(a.values))


def sum_(a, axis: int | None = None) -> Tensor:
    a = _as_tensor(a)
    if axis is not None and not -a.ndim <= axis < a.ndim:
        raise InvalidInputError(f"sum: eje {axis} inválido para shape {a.shape}")
    return _emit("sum", (a,), np.sum(a.values, axis=axis), axis=axis)


def mean(a, axis: int | None = None) -> Tensor:
    a = _as_tensor(a)
    if a.size == 0:
        raise InvalidInputError("mean de un tensor vacío")
    if axis is not None and not -a.ndim <= axis < a.ndim:
        raise InvalidInputError(f"mean: eje {axis} inválido para shape {a.shape}")
    count = a.size if axis is None else a.shape[axis]
    return _emit("mean", (a,), np.mean(a.values, axis=axis), axis=axis, count=count)


def max_over_axis(a, axis: int = -1) -> Tensor:
    """Máximo a lo largo de un eje; el gradiente va al primer argmax."""
    a = _as_tensor(a)
    if a.ndim == 0 or not -a.ndim <= axis < a.ndim:
        raise InvalidInputError(f"max_over_axis: eje {axis} inválido para shape {a.shape}")
    index = np.argmax(a.values, axis=axis)
    values = np.take_along_axis(a.values, np.expand_dims(index, axis), axis=axis)
    return _emit("max_over_axis", (a,), np.squeeze(values, axis=axis), axis=axis, index=index)


def _row_check(op: str, a: Tensor):
    if a.ndim != 2:
        raise InvalidInputError(f"{op} requiere una matriz 2-D, shape={a.shape}")


def softmax_rows(a) -> Tensor:
    """Softmax por fila con resta del máximo para evitar overflow."""
    a = _as_tensor(a)
    _row_check("softmax_rows", a)
    shifted = a.values - a.values.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return _emit("softmax_rows", (a,), e / e.sum(axis=1, keepdims=True))


def log_softmax_rows(a) -> Tensor:
    """log-softmax por fila (forma log-sum-exp estabilizada)."""
    a = _as_tensor(a)
    _row_check("log_softmax_rows", a)
    shifted = a.values - a.values.max(axis=1, keepdims=True)
    out = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return _emit("log_softmax_rows", (a,), out)


def slice_rows(a, start: int, stop: int) -> Tensor:
    a = _as_tensor(a)
    if a.ndim == 0 or not 0 <= start <= stop <= a.shape[0]:
        raise InvalidInputError(f"slice_rows: rango [{start}, {stop}) inválido para shape {a.shape}")
    return _emit("slice_rows", (a,), a.values[start:stop], start=start, stop=stop)


def take_rows(a, indices) -> Tensor:
    """Selecciona filas por índice (con repetición); generaliza slice_rows."""
    a = _as_tensor(a)
    idx = np.asarray(indices, dtype=np.int64).reshape(-1)
    if a.ndim == 0 or idx.size and (idx.min() < 0 or idx.max() >= a.shape[0]):
        raise InvalidInputError(f"take_rows: índices fuera de rango para shape {a.shape}")
    return _emit("take_rows", (a,), a.values[idx], indices=idx)


def concat_rows(tensors) -> Tensor:
    tensors = tuple(_as_tensor(t) for t in tensors)
    if not tensors:
        raise InvalidInputError("concat_rows requiere al menos un tensor")
    tails = {t.shape[1:] for t in tensors}
    if any(t.ndim == 0 for t in tensors) or len(tails) != 1:
        raise InvalidInputError(f"concat_rows: shapes incompatibles {[t.shape for t in tensors]}")
    sizes = [t.shape[0] for t in tensors]
    return _emit("concat_rows", tensors, np.concatenate([t.values for t in tensors], axis=0), sizes=sizes)


def scale_rows(a, factors) -> Tensor:
    """Multiplica la fila i de `a` (m, n) por factors[i] (m,)."""
    a, s = _as_tensor(a), _as_tensor(factors)
    if a.ndim != 2 or s.shape != (a.shape[0],):
        raise InvalidInputError(f"scale_rows: shapes incompatibles {a.shape} y {s.shape}")
    return _emit("scale_rows", (a, s), a.values * s.values[:, None])


def huber(a, delta: float) -> Tensor:
    """l_δ elementwise: x²/2 si |x| ≤ δ, si no δ·(|x| − δ/2)."""
    a = _as_tensor(a)
    delta = float(delta)
    if delta <= 0:
        raise InvalidInputError(f"huber: delta debe ser > 0 (recibido {delta})")
    x = a.values
    ax = np.abs(x)
    values = np.where(ax <= delta, 0.5 * x * x, delta * (ax - 0.5 * delta))
    return _emit("huber", (a,), values, delta=delta)


def clip(a, low: float, high: float) -> Tensor:
    """Recorta a [low, high]; el gradiente pasa solo donde el valor ya estaba en rango."""
    a = _as_tensor(a)
    low, high = float(low), float(high)
    if not low <= high:
        raise InvalidInputError(f"clip: rango [{low}, {high}] vacío")
    return _emit("clip", (a,), np.clip(a.values, low, high), low=low, high=high)


# =========================================================================
# REGLAS DE BACKWARD
# =========================================================================
# Cada regla recibe (g, record) y devuelve un gradiente por entrada
# (None si la entrada no necesita gradiente).


def _add_backward(g, rec):
    a, b = rec.inputs
    return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)


def _subtract_backward(g, rec):
    a, b = rec.inputs
    return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)


def _multiply_backward(g, rec):
    a, b = rec.inputs
    return _unbroadcast(g * b.values, a.shape), _unbroadcast(g * a.values, b.shape)


def _scale_backward(g, rec):
    return (g * rec.context["factor"],)


def _reciprocal_backward(g, rec):
    out = rec.output.values
    return (-g * out * out,)


def _matmul_backward(g, rec):
    a, b = rec.inputs
    return g @ b.values.T, a.values.T @ g


def _relu_backward(g, rec):
    # Subgradiente 0 exactamente en 0
    return (g * (rec.inputs[0].values > 0.0),)


def _log_backward(g, rec):
    return (g / rec.inputs[0].values,)


def _exp_backward(g, rec):
    return (g * rec.output.values,)


def _sqrt_backward(g, rec):
    return (g * 0.5 / rec.output.values,)


def _expand_reduced(g, shape, axis):
    if axis is None:
        return np.broadcast_to(g, shape).copy()
    return np.broadcast_to(np.expand_dims(g, axis), shape).copy()


def _sum_backward(g, rec):
    return (_expand_reduced(g, rec.inputs[0].shape, rec.context["axis"]),)


def _mean_backward(g, rec):
    expanded = _expand_reduced(g, rec.inputs[0].shape, rec.context["axis"])
    return (expanded / rec.context["count"],)


def _max_over_axis_backward(g, rec):
    a = rec.inputs[0]
    axis = rec.context["axis"]
    out = np.zeros_like(a.values)
    index = np.expand_dims(rec.context["index"], axis)
    np.put_along_axis(out, index, np.expand_dims(g, axis), axis=axis)
    return (out,)


def _softmax_rows_backward(g, rec):
    s = rec.output.values
    return (s * (g - (g * s).sum(axis=1, keepdims=True)),)


def _log_softmax_rows_backward(g, rec):
    s = np.exp(rec.output.values)
    return (g - s * g.sum(axis=1, keepdims=True),)


def _slice_rows_backward(g, rec):
    out = np.zeros_like(rec.inputs[0].values)
    out[rec.context["start"] : rec.context["stop"]] = g
    return (out,)


def _take_rows_backward(g, rec):
    out = np.zeros_like(rec.inputs[0].values)
    np.add.at(out, rec.context["indices"], g)
    return (out,)


def _concat_rows_backward(g, rec):
    bounds = np.cumsum(rec.context["sizes"])[:-1]
    return tuple(np.split(g, bounds, axis=0))


def _scale_rows_backward(g, rec):
    a, s = rec.inputs
    return g * s.values[:, None], (g * a.values).sum(axis=1)


def _huber_backward(g, rec):
    delta = rec.context["delta"]
    return (g * np.clip(rec.inputs[0].values, -delta, delta),)


def _clip_backward(g, rec):
    x = rec.inputs[0].values
    return (g * ((x >= rec.context["low"]) & (x <= rec.context["high"])),)


BACKWARD_RULES = {
    "add": _add_backward,
    "subtract": _subtract_backward,
    "multiply": _multiply_backward,
    "scale": _scale_backward,
    "reciprocal": _reciprocal_backward,
    "matmul": _matmul_backward,
    "relu": _relu_backward,
    "log": _log_backward,
    "exp": _exp_backward,
    "sqrt": _sqrt_backward,
    "sum": _sum_backward,
    "mean": _mean_backward,
    "max_over_axis": _max_over_axis_backward,
    "softmax_rows": _softmax_rows_backward,
    "log_softmax_rows": _log_softmax_rows_backward,
    "slice_rows": _slice_rows_backward,
    "take_rows": _take_rows_backward,
    "concat_rows": _concat_rows_backward,
    "scale_rows": _scale_rows_backward,
    "huber": _huber_backward,
    "clip": _clip_backward,
}
