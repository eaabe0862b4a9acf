"""
Pérdida DASK del student:

    L = CE(y, y^S) + α·L_K + β·(L_D + L_A) + γ·L_S

- CE: cross-entropy con log-sum-exp estabilizado
- L_K: KL(teacher ‖ student) de los soft targets a temperatura T, media
  sobre ejemplos y escalada por T²
- L_D, L_A: pérdidas relacionales (losses/relational.py)
- L_S: media de ‖H^S_proj − H^T‖² por ejemplo

Un peso en 0 (o un término relacional deshabilitado) saca el término del
grafo y lo reporta como 0.0 en el desglose.

Uso:
    total, breakdown = dask_total(batch, DaskConfig(), pairs, triplets)
    breakdown.weighted_total(cfg) == total.item()
"""

from dataclasses import dataclass, replace

import numpy as np

import autodiff as ad
import config
from autodiff import Tensor
from errors import InvalidInputError
from losses.relational import angle_loss, distance_loss


@dataclass(frozen=True)
class DaskConfig:
    """
    Hiperparámetros de la pérdida.

    Attributes:
        alpha, beta, gamma: pesos ≥ 0 de soft targets, relacional y semántico
        temperature: T > 0
        huber_delta: δ > 0 de l_δ
        pair_limit, triplet_limit: topes del muestreo de relaciones (≥ 1)
        distance_enabled, angle_enabled: qué términos relacionales multiplica β
    """

    alpha: float = config.ALPHA
    beta: float = config.BETA
    gamma: float = config.GAMMA
    temperature: float = config.TEMPERATURE
    huber_delta: float = config.HUBER_DELTA
    pair_limit: int = config.PAIR_LIMIT
    triplet_limit: int = config.TRIPLET_LIMIT
    distance_enabled: bool = True
    angle_enabled: bool = True

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = float(getattr(self, name))
            if not value >= 0.0:
                raise InvalidInputError(f"{name} debe ser ≥ 0 (recibido {value})")
            object.__setattr__(self, name, value)
        if not float(self.temperature) > 0.0:
            raise InvalidInputError(f"temperature debe ser > 0 (recibido {self.temperature})")
        if not float(self.huber_delta) > 0.0:
            raise InvalidInputError(f"huber_delta debe ser > 0 (recibido {self.huber_delta})")
        if int(self.pair_limit) < 1 or int(self.triplet_limit) < 1:
            raise InvalidInputError("pair_limit y triplet_limit deben ser ≥ 1")
        object.__setattr__(self, "temperature", float(self.temperature))
        object.__setattr__(self, "huber_delta", float(self.huber_delta))
        object.__setattr__(self, "pair_limit", int(self.pair_limit))
        object.__setattr__(self, "triplet_limit", int(self.triplet_limit))

    @property
    def uses_distance(self) -> bool:
        return self.beta > 0.0 and self.distance_enabled

    @property
    def uses_angle(self) -> bool:
        return self.beta > 0.0 and self.angle_enabled

    @property
    def uses_relations(self) -> bool:
        return self.uses_distance or self.uses_angle

    def for_variant(self, variant_name: str) -> "DaskConfig":
        """Copia con los switches de una variante de ablación aplicados."""
        variant = config.get_variant_config(variant_name)
        changes = {
            "distance_enabled": variant["distance"],
            "angle_enabled": variant["angle"],
        }
        for weight in ("alpha", "beta", "gamma"):
            if variant[weight] is not None:
                changes[weight] = variant[weight]
        return replace(self, **changes)


@dataclass(frozen=True)
class DistillBatch:
    """
    Salidas emparejadas de teacher y student para m ejemplos.

    student_projected es H^S pasado por la proyección d_S → d_T; si falta,
    el término semántico usa student_features directamente.
    """

    teacher_logits: Tensor
    student_logits: Tensor
    teacher_features: Tensor
    student_features: Tensor
    labels: np.ndarray
    student_projected: Tensor | None = None

    def __post_init__(self):
        for name in ("teacher_logits", "student_logits", "teacher_features", "student_features", "student_projected"):
            value = getattr(self, name)
            if value is None:
                continue
            tensor = value if isinstance(value, Tensor) else Tensor(value)
            if tensor.ndim != 2:
                raise InvalidInputError(f"{name} debe ser una matriz, shape={tensor.shape}")
            object.__setattr__(self, name, tensor)

        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        object.__setattr__(self, "labels", labels)

        m = self.size
        if m < 1:
            raise InvalidInputError("El lote necesita al menos un ejemplo")
        if self.classes < 2:
            raise InvalidInputError(f"Se necesitan K ≥ 2 clases (K={self.classes})")
        if self.teacher_logits.shape != self.student_logits.shape:
            raise InvalidInputError(
                f"Logits con shapes distintos: {self.teacher_logits.shape} vs {self.student_logits.shape}"
            )
        rows = {
            "teacher_features": self.teacher_features.shape[0],
            "student_features": self.student_features.shape[0],
            "labels": labels.shape[0],
        }
        if self.student_projected is not None:
            rows["student_projected"] = self.student_projected.shape[0]
        mismatched = {k: v for k, v in rows.items() if v != m}
        if mismatched:
            raise InvalidInputError(f"Cantidad de filas distinta de m={m}: {mismatched}")
        _check_labels(labels, self.classes)

    @property
    def size(self) -> int:
        return int(self.student_logits.shape[0])

    @property
    def classes(self) -> int:
        return int(self.student_logits.shape[1])

    @property
    def semantic_student(self) -> Tensor:
        return self.student_features if self.student_projected is None else self.student_projected


@dataclass(frozen=True)
class DaskBreakdown:
    """Valor de cada término (sin ponderar) y el total ponderado."""

    ce: float
    kd: float
    distance: float
    angle: float
    semantic: float
    total: float

    def weighted_total(self, cfg: DaskConfig) -> float:
        """Recalcula el total con el mismo orden de operaciones que dask_total."""
        return ((self.ce + self.kd * cfg.alpha) + (self.distance + self.angle) * cfg.beta) + (
            self.semantic * cfg.gamma
        )

    def as_record(self) -> dict:
        """Claves del archivo de métricas."""
        return {
            "loss_total": self.total,
            "loss_ce": self.ce,
            "loss_kd": self.kd,
            "loss_d": self.distance,
            "loss_a": self.angle,
            "loss_s": self.semantic,
        }


def _check_labels(labels: np.ndarray, classes: int):
    bad = np.flatnonzero((labels < 0) | (labels >= classes))
    if bad.size:
        raise InvalidInputError(
            f"Label {labels[bad[0]]} fuera de rango [0, {classes}) en la posición {bad[0]}"
        )


def _as_logits(x) -> Tensor:
    t = x if isinstance(x, Tensor) else Tensor(x)
    if t.ndim != 2:
        raise InvalidInputError(f"Se esperaban logits m×K, shape={t.shape}")
    return t


# =========================================================================
# TÉRMINOS
# =========================================================================


def cross_entropy(logits, labels) -> Tensor:
    """Media de −log softmax(logits)[label]."""
    logits = _as_logits(logits)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    m, k = logits.shape
    if labels.shape[0] != m:
        raise InvalidInputError(f"{labels.shape[0]} labels para {m} filas de logits")
    _check_labels(labels, k)

    one_hot = np.zeros((m, k))
    one_hot[np.arange(m), labels] = 1.0
    picked = ad.sum_(ad.log_softmax_rows(logits) * one_hot)
    return ad.scale(picked, -1.0 / m)


def soft_targets(logits, temperature: float) -> Tensor:
    """softmax por fila de logits / T."""
    if not float(temperature) > 0.0:
        raise InvalidInputError(f"La temperatura debe ser > 0 (recibido {temperature})")
    return ad.softmax_rows(ad.scale(_as_logits(logits), 1.0 / float(temperature)))


def kd_soft_loss(teacher_logits, student_logits, temperature: float) -> Tensor:
    """T² · media por ejemplo de KL(soft_targets(teacher) ‖ soft_targets(student))."""
    teacher_logits = _as_logits(teacher_logits)
    student_logits = _as_logits(student_logits)
    if teacher_logits.shape != student_logits.shape:
        raise InvalidInputError(
            f"Logits con shapes distintos: {teacher_logits.shape} vs {student_logits.shape}"
        )
    t = float(temperature)
    p = soft_targets(teacher_logits, t)
    log_p = ad.log_softmax_rows(ad.scale(teacher_logits, 1.0 / t))
    log_q = ad.log_softmax_rows(ad.scale(student_logits, 1.0 / t))
    kl = ad.sum_(p * (log_p - log_q))
    return ad.scale(kl, t * t / teacher_logits.shape[0])


def huber(x, delta: float):
    """l_δ: x²/2 si |x| ≤ δ, si no δ·(|x| − δ/2). Acepta escalares o arrays."""
    if not float(delta) > 0.0:
        raise InvalidInputError(f"delta debe ser > 0 (recibido {delta})")
    values = ad.huber(Tensor(x), delta).values
    return float(values) if values.ndim == 0 else values


def semantic_loss(teacher_features, student_projected) -> Tensor:
    """Media por ejemplo de ‖H^S − H^T‖²."""
    t = teacher_features if isinstance(teacher_features, Tensor) else Tensor(teacher_features)
    s = student_projected if isinstance(student_projected, Tensor) else Tensor(student_projected)
    if t.shape != s.shape or t.ndim != 2:
        raise InvalidInputError(
            f"Features semánticas con dimensiones distintas: {t.shape} vs {s.shape}"
        )
    diff = s - t
    return ad.scale(ad.sum_(diff * diff), 1.0 / t.shape[0])


# =========================================================================
# PÉRDIDA TOTAL
# =========================================================================


def dask_total(
    batch: DistillBatch,
    cfg: DaskConfig,
    pairs=None,
    triplets=None,
    frozen_mu: tuple | None = None,
) -> tuple:
    """
    Combina los cinco términos.

    Args:
        pairs, triplets: muestra de relaciones (requeridas si β > 0)
        frozen_mu: (μ_teacher, μ_student) fijos para L_D; None = calcular

    Returns:
        tuple: (total Tensor escalar, DaskBreakdown)
    """
    ce = cross_entropy(batch.student_logits, batch.labels)
    total = ce
    values = {"ce": ce.item(), "kd": 0.0, "distance": 0.0, "angle": 0.0, "semantic": 0.0}

    if cfg.alpha > 0.0:
        kd = kd_soft_loss(batch.teacher_logits, batch.student_logits, cfg.temperature)
        values["kd"] = kd.item()
        total = total + kd * cfg.alpha

    relational = None
    if cfg.uses_distance:
        if pairs is None:
            raise InvalidInputError("β > 0 con distancia habilitada requiere pares")
        teacher_mu, student_mu = frozen_mu if frozen_mu is not None else (None, None)
        dist = distance_loss(
            batch.teacher_features,
            batch.student_features,
            pairs,
            cfg.huber_delta,
            teacher_mu=teacher_mu,
            student_mu=student_mu,
        )
        values["distance"] = dist.item()
        relational = dist
    if cfg.uses_angle:
        if triplets is None:
            raise InvalidInputError("β > 0 con ángulo habilitado requiere tripletas")
        ang = angle_loss(batch.teacher_features, batch.student_features, triplets, cfg.huber_delta)
        values["angle"] = ang.item()
        relational = ang if relational is None else relational + ang
    if relational is not None:
        total = total + relational * cfg.beta

    if cfg.gamma > 0.0:
        sem = semantic_loss(batch.teacher_features, batch.semantic_student)
        values["semantic"] = sem.item()
        total = total + sem * cfg.gamma

    breakdown = DaskBreakdown(total=total.item(), **values)
    return total, breakdown
