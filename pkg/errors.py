"""
Jerarquía de excepciones del pipeline VSKD.

Cada categoría corresponde a un código de salida estable del CLI
(ver config.EXIT_*). Solo vskd.py traduce excepciones a códigos;
las librerías se limitan a lanzar la categoría correcta con un mensaje
que nombre el valor problemático.
"""


class VskdError(Exception):
    """Base de todos los errores propios del proyecto."""


class InvalidInputError(VskdError, ValueError):
    """Entrada inválida: CSV mal formado, shapes inconsistentes, hiperparámetros fuera de rango."""


class ArtifactError(VskdError):
    """Checkpoint o imagen raw inexistente, truncado o con magic/versión incorrectos."""


class TrainingError(VskdError):
    """El entrenamiento divergió (loss no finito)."""

    def __init__(self, message: str, epoch: int | None = None):
        super().__init__(message)
        self.epoch = epoch


class VerificationError(VskdError):
    """Algún gradiente no coincide con diferencias finitas."""

    def __init__(self, message: str, failing: list[str] | None = None):
        super().__init__(message)
        self.failing = failing or []


class AutodiffError(VskdError, ValueError):
    """Uso incorrecto de la cinta: salida no escalar o backward repetido."""
