"""
Interfaz común de las redes teacher y student.

Patrón de diseño: Strategy Pattern
- training/trainer.py = Contexto (bucle de entrenamiento)
- BaseNet = Estrategia abstracta
- TeacherNet, StudentNet = Estrategias concretas

Ambas redes son MLP de 3 capas sobre la imagen GAF aplanada (side²·3
valores). El bucle de entrenamiento solo conoce esta interfaz:

1. forward(x, training, rng) → NetOutput (logits, features, projected)
2. parameters() → tensores a optimizar, en orden fijo
3. state_dict() / from_state() para checkpoints

Ejemplo de implementación:
    class MiRed(BaseNet):
        kind = "mired"

        def layer_shapes(self):
            return {"w1": (self.input_dim, 8), "b1": (8,), ...}

        def forward(self, x, training=False, rng=None):
            ...
"""

import copy
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

import autodiff as ad
from autodiff import Tensor
from errors import ArtifactError, InvalidInputError


@dataclass
class NetOutput:
    """
    Salida de un forward.

    Attributes:
        logits: m×K
        features: m×d, activaciones de la penúltima capa (H)
        projected: m×d_T, H^S proyectado (solo student)
        preactivations: entradas de cada relu, para evitar kinks al verificar
    """

    logits: Tensor
    features: Tensor
    projected: Tensor | None = None
    preactivations: tuple = ()


def dense(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    return ad.matmul(x, weight) + bias


class BaseNet(ABC):
    """
    Clase abstracta de red de clasificación con features intermedias.

    Attributes:
        kind (str): prefijo de los parámetros en checkpoints ('teacher', 'student')
        input_dim (int): largo del vector de entrada
        hidden (tuple): anchos de las dos capas ocultas
        classes (int): K
        params (dict): nombre → Tensor con requires_grad=True
    """

    kind = "base"

    def __init__(self, input_dim: int, hidden: tuple, classes: int, seed: int = 0):
        hidden = tuple(int(h) for h in hidden)
        if int(input_dim) < 1 or len(hidden) != 2 or min(hidden) < 1 or int(classes) < 2:
            raise InvalidInputError(
                f"Dimensiones inválidas: input={input_dim}, hidden={hidden}, classes={classes}"
            )
        self.input_dim = int(input_dim)
        self.hidden = hidden
        self.classes = int(classes)
        self.seed = int(seed)
        self.params = self.init_params()

    # --- Contrato ---

    @abstractmethod
    def layer_shapes(self) -> dict:
        """
        Shapes de todos los parámetros, en el orden de optimización.

        Returns:
            dict: nombre → tuple (ej: {'w1': (3072, 256), 'b1': (256,), ...})
        """
        pass

    @abstractmethod
    def forward(self, x, training: bool = False, rng=None) -> NetOutput:
        """
        Evalúa la red sobre un lote de entradas aplanadas.

        Args:
            x: Tensor o array m×input_dim
            training: habilita regularización de entrenamiento (dropout)
            rng: numpy Generator para máscaras de dropout

        Returns:
            NetOutput
        """
        pass

    @abstractmethod
    def init_rng(self) -> np.random.Generator:
        """Generador de la inicialización (distinto por tipo de red)."""
        pass

    # --- Implementación compartida ---

    @property
    def feature_dim(self) -> int:
        return self.hidden[1]

    def init_params(self) -> dict:
        """He-normal para pesos de capas con relu, ceros para biases."""
        rng = self.init_rng()
        params = {}
        for name, shape in self.layer_shapes().items():
            if len(shape) == 1:
                values = np.zeros(shape)
            else:
                values = rng.standard_normal(shape) * np.sqrt(2.0 / shape[0])
            params[name] = Tensor(values, requires_grad=True, name=f"{self.kind}.{name}")
        return params

    def parameters(self) -> list:
        return [self.params[name] for name in self.layer_shapes()]

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def state_dict(self) -> dict:
        """Copia de los valores con nombres prefijados por el tipo de red."""
        return {f"{self.kind}.{name}": self.params[name].values.copy() for name in self.layer_shapes()}

    def load_state(self, params: dict):
        """
        Reemplaza los valores de los parámetros.

        Raises:
            ArtifactError: Si faltan parámetros o algún shape no coincide
        """
        expected = self.layer_shapes()
        missing = sorted(set(expected) - set(params))
        extra = sorted(set(params) - set(expected))
        if missing or extra:
            raise ArtifactError(f"Parámetros de {self.kind} inconsistentes: faltan {missing}, sobran {extra}")
        for name, shape in expected.items():
            values = np.asarray(params[name], dtype=np.float64)
            if values.shape != tuple(shape):
                raise ArtifactError(
                    f"Shape de {self.kind}.{name} = {values.shape}, se esperaba {tuple(shape)}"
                )
            self.params[name] = Tensor(values, requires_grad=True, name=f"{self.kind}.{name}")

    @classmethod
    @abstractmethod
    def from_state(cls, params: dict) -> "BaseNet":
        """Reconstruye la red infiriendo las dimensiones de los shapes guardados."""
        pass

    def with_params(self, **overrides) -> "BaseNet":
        """Copia liviana con algunos parámetros reemplazados (los demás se comparten)."""
        clone = copy.copy(self)
        clone.params = dict(self.params)
        for name, tensor in overrides.items():
            if name not in clone.params:
                raise KeyError(f"Parámetro '{name}' no existe en {self.kind}")
            clone.params[name] = tensor
        return clone

    def _check_input(self, x) -> Tensor:
        t = x if isinstance(x, Tensor) else Tensor(x)
        if t.ndim != 2 or t.shape[1] != self.input_dim:
            raise InvalidInputError(
                f"Entrada de {self.kind} con shape {t.shape}; se esperaba (m, {self.input_dim})"
            )
        return t

    def predict(self, x) -> np.ndarray:
        """
        Clase predicha por fila (argmax de logits), sin grabar en cinta.

        Un solo forward sobre todo el conjunto: mismos shapes que el
        registro de métricas del entrenamiento, mismos resultados bit a bit.
        """
        x = np.asarray(x.values if isinstance(x, Tensor) else x, dtype=np.float64)
        if x.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        return np.argmax(self.forward(x).logits.values, axis=1).astype(np.int64)

    def __repr__(self):
        return (
            f"{type(self).__name__}(input_dim={self.input_dim}, hidden={self.hidden}, "
            f"classes={self.classes}, params={self.parameter_count()})"
        )
