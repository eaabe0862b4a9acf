"""
Red teacher: MLP input → 256 → 64 → K sobre la vista teacher (menos ruido).

Se entrena solo con cross-entropy y queda congelada durante la
destilación: el student nunca modifica sus parámetros.
"""

import numpy as np

import autodiff as ad
import config
from errors import ArtifactError, InvalidInputError
from models.base import BaseNet, NetOutput, dense


class TeacherNet(BaseNet):
    """
    Attributes:
        dropout (float): probabilidad de apagar una unidad de la primera capa
                         oculta durante el entrenamiento (0 = sin dropout)
    """

    kind = "teacher"

    def __init__(
        self,
        input_dim: int,
        hidden: tuple = config.TEACHER_HIDDEN,
        classes: int = config.CLASSES,
        seed: int = config.SEED,
        dropout: float = config.TEACHER_DROPOUT,
    ):
        if not 0.0 <= float(dropout) < 1.0:
            raise InvalidInputError(f"dropout debe estar en [0, 1) (recibido {dropout})")
        self.dropout = float(dropout)
        super().__init__(input_dim, hidden, classes, seed)

    def init_rng(self) -> np.random.Generator:
        return np.random.default_rng([self.seed, 0])

    def layer_shapes(self) -> dict:
        h1, h2 = self.hidden
        return {
            "w1": (self.input_dim, h1),
            "b1": (h1,),
            "w2": (h1, h2),
            "b2": (h2,),
            "w3": (h2, self.classes),
            "b3": (self.classes,),
        }

    def forward(self, x, training: bool = False, rng=None) -> NetOutput:
        x = self._check_input(x)
        p = self.params

        z1 = dense(x, p["w1"], p["b1"])
        h1 = ad.relu(z1)
        if training and self.dropout > 0.0:
            if rng is None:
                raise InvalidInputError("Dropout en entrenamiento requiere un rng")
            keep = rng.random(h1.shape) >= self.dropout
            h1 = h1 * (keep / (1.0 - self.dropout))

        z2 = dense(h1, p["w2"], p["b2"])
        features = ad.relu(z2)
        logits = dense(features, p["w3"], p["b3"])
        return NetOutput(logits=logits, features=features, preactivations=(z1, z2))

    @classmethod
    def from_state(cls, params: dict) -> "TeacherNet":
        try:
            input_dim, h1 = params["w1"].shape
            h2, classes = params["w3"].shape
        except (KeyError, ValueError) as e:
            raise ArtifactError(f"Checkpoint de teacher incompleto: {e}") from e
        net = cls(input_dim, (h1, h2), classes)
        net.load_state(params)
        return net
