"""
Red student: MLP input → 64 → 32 → K sobre la vista student (más ruido),
más una proyección lineal H^S (32) → d_T (64) para el término semántico.

La proyección se entrena junto con la red y arranca como identidad
cuando d_S == d_T.
"""

import numpy as np

import autodiff as ad
import config
from errors import ArtifactError
from models.base import BaseNet, NetOutput, dense


class StudentNet(BaseNet):
    """
    Attributes:
        teacher_dim (int): ancho de H^T al que proyecta el student
    """

    kind = "student"

    def __init__(
        self,
        input_dim: int,
        hidden: tuple = config.STUDENT_HIDDEN,
        classes: int = config.CLASSES,
        seed: int = config.SEED,
        teacher_dim: int = config.TEACHER_HIDDEN[1],
    ):
        self.teacher_dim = int(teacher_dim)
        super().__init__(input_dim, hidden, classes, seed)

    def init_rng(self) -> np.random.Generator:
        return np.random.default_rng([self.seed, 1])

    def layer_shapes(self) -> dict:
        h1, h2 = self.hidden
        return {
            "w1": (self.input_dim, h1),
            "b1": (h1,),
            "w2": (h1, h2),
            "b2": (h2,),
            "w3": (h2, self.classes),
            "b3": (self.classes,),
            "proj": (h2, self.teacher_dim),
        }

    def init_params(self) -> dict:
        params = super().init_params()
        h2 = self.hidden[1]
        if h2 == self.teacher_dim:
            params["proj"].values = np.eye(h2)
        else:
            # Sin relu detrás: varianza 1/fan_in
            params["proj"].values = params["proj"].values / np.sqrt(2.0)
        return params

    def forward(self, x, training: bool = False, rng=None) -> NetOutput:
        x = self._check_input(x)
        p = self.params

        z1 = dense(x, p["w1"], p["b1"])
        h1 = ad.relu(z1)
        z2 = dense(h1, p["w2"], p["b2"])
        features = ad.relu(z2)
        logits = dense(features, p["w3"], p["b3"])
        projected = ad.matmul(features, p["proj"])
        return NetOutput(logits=logits, features=features, projected=projected, preactivations=(z1, z2))

    @classmethod
    def from_state(cls, params: dict) -> "StudentNet":
        try:
            input_dim, h1 = params["w1"].shape
            h2, classes = params["w3"].shape
            teacher_dim = params["proj"].shape[1]
        except (KeyError, ValueError, IndexError) as e:
            raise ArtifactError(f"Checkpoint de student incompleto: {e}") from e
        net = cls(input_dim, (h1, h2), classes, teacher_dim=teacher_dim)
        net.load_state(params)
        return net
