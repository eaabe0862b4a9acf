"""
Métricas de clasificación: accuracy, F1 macro y matriz de confusión.

Convención de F1 macro: las clases ausentes tanto de las predicciones como
de la verdad no entran en la media; una clase con instancias pero sin
predicciones positivas tiene F1 = 0.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.metrics import confusion_matrix, f1_score

from errors import InvalidInputError


@dataclass(frozen=True)
class EvalResult:
    accuracy: float
    f1: float
    confusion: np.ndarray
    size: int

    def as_record(self) -> dict:
        return {"accuracy": self.accuracy, "f1": self.f1}


def classification_metrics(labels, predictions, classes: int | None = None) -> EvalResult:
    """
    Métricas a partir de labels y predicciones ya calculadas.

    Args:
        classes: tamaño de la matriz de confusión (default: máximo label + 1)

    Raises:
        InvalidInputError: Si no hay ejemplos o las longitudes difieren
    """
    y_true = np.asarray(labels, dtype=np.int64).reshape(-1)
    y_pred = np.asarray(predictions, dtype=np.int64).reshape(-1)
    if y_true.size == 0:
        raise InvalidInputError("No se puede evaluar un split vacío")
    if y_true.shape != y_pred.shape:
        raise InvalidInputError(f"{y_true.size} labels para {y_pred.size} predicciones")

    if classes is None:
        classes = int(max(y_true.max(), y_pred.max())) + 1
    present = np.union1d(y_true, y_pred)

    accuracy = float(np.mean(y_true == y_pred))
    f1 = float(f1_score(y_true, y_pred, labels=present, average="macro", zero_division=0))
    confusion = confusion_matrix(y_true, y_pred, labels=np.arange(classes))
    return EvalResult(accuracy=accuracy, f1=f1, confusion=confusion, size=int(y_true.size))


def evaluate(model, images, labels) -> EvalResult:
    """
    Evalúa una red sobre un conjunto de imágenes aplanadas.

    Returns:
        EvalResult con accuracy ∈ [0, 1], F1 macro ∈ [0, 1] y matriz K×K
    """
    images = np.asarray(images, dtype=np.float64)
    if images.ndim != 2 or images.shape[0] == 0:
        raise InvalidInputError(f"Split vacío o mal formado: shape={images.shape}")
    return classification_metrics(labels, model.predict(images), classes=model.classes)


def evaluate_split(model, split) -> EvalResult:
    """Evalúa sobre la vista del split que le corresponde al tipo de red."""
    return evaluate(model, split.view(model.kind), split.labels)
