"""
Entrenamiento de teacher y student con SGD + momentum.

Protocolo:
1. train_teacher: TeacherNet con cross-entropy sobre la vista teacher.
2. distill_student: StudentNet con dask_total sobre la vista student,
   contra las salidas del teacher congelado sobre la vista teacher de los
   mismos ejemplos (se calculan una sola vez: el teacher nunca se toca).
3. train_student_baseline: StudentNet solo con cross-entropy, mismo bucle.

Semillas (todas derivadas de cfg.seed, numpy.random.default_rng):
    [seed, 0] / [seed, 1]        inicialización teacher / student
    [seed, 2]                    orden de los lotes
    [seed, 3, época, lote]       muestreo de relaciones en train
    [seed, 4]                    máscaras de dropout del teacher
    [seed, 5, época]             muestreo de relaciones en test

Cada época agrega dos registros (split train y test) con las claves
epoch, split, loss_total, loss_ce, loss_kd, loss_d, loss_a, loss_s,
accuracy, f1.
"""

from dataclasses import dataclass, field, replace

import numpy as np

import config
from autodiff import Tape, Tensor
from errors import InvalidInputError, TrainingError
from losses.dask import DaskBreakdown, DaskConfig, DistillBatch, cross_entropy, dask_total
from losses.relational import sample_relations
from models.student import StudentNet
from models.teacher import TeacherNet
from training.checkpoint import save_checkpoint
from training.metrics import classification_metrics

BREAKDOWN_FIELDS = ("ce", "kd", "distance", "angle", "semantic", "total")


@dataclass(frozen=True)
class TrainConfig:
    """
    Configuración de un entrenamiento.

    Attributes:
        rate: paso de SGD del teacher (≥ 0; 0 deja los parámetros intactos)
        student_rate: paso de SGD del student (baseline y destilación), ≥ 0
        momentum: coeficiente de momentum en [0, 1)
        epochs: ≥ 1
        batch_size: m ≥ 4 (los términos relacionales necesitan pares y tripletas)
        dask: hiperparámetros de la pérdida del student
        seed: semilla de inicialización, orden de lotes y relaciones
        checkpoint_path: si se indica, se guarda la red al terminar
        teacher_hidden, student_hidden: anchos ocultos
        teacher_dropout: dropout de la primera capa oculta del teacher
        grad_clip: norma global máxima del gradiente (0 = sin recorte)
    """

    rate: float = config.LEARNING_RATE
    student_rate: float = config.STUDENT_LEARNING_RATE
    momentum: float = config.MOMENTUM
    epochs: int = config.EPOCHS
    batch_size: int = config.BATCH_SIZE
    dask: DaskConfig = field(default_factory=DaskConfig)
    seed: int = config.SEED
    checkpoint_path: str | None = None
    teacher_hidden: tuple = config.TEACHER_HIDDEN
    student_hidden: tuple = config.STUDENT_HIDDEN
    teacher_dropout: float = config.TEACHER_DROPOUT
    grad_clip: float = config.GRAD_CLIP

    def __post_init__(self):
        if not float(self.rate) >= 0.0:
            raise InvalidInputError(f"rate debe ser ≥ 0 (recibido {self.rate})")
        if not float(self.student_rate) >= 0.0:
            raise InvalidInputError(f"student_rate debe ser ≥ 0 (recibido {self.student_rate})")
        if not 0.0 <= float(self.momentum) < 1.0:
            raise InvalidInputError(f"momentum debe estar en [0, 1) (recibido {self.momentum})")
        if int(self.epochs) < 1:
            raise InvalidInputError(f"epochs debe ser ≥ 1 (recibido {self.epochs})")
        if int(self.batch_size) < config.MIN_RELATION_BATCH:
            raise InvalidInputError(
                f"batch_size debe ser ≥ {config.MIN_RELATION_BATCH} (recibido {self.batch_size})"
            )
        if not float(self.grad_clip) >= 0.0:
            raise InvalidInputError(f"grad_clip debe ser ≥ 0 (recibido {self.grad_clip})")
        if int(self.seed) < 0:
            raise InvalidInputError(f"seed debe ser ≥ 0 (recibido {self.seed})")
        object.__setattr__(self, "teacher_hidden", tuple(int(h) for h in self.teacher_hidden))
        object.__setattr__(self, "student_hidden", tuple(int(h) for h in self.student_hidden))

    def rate_for(self, kind: str) -> float:
        """Paso de SGD según el tipo de red."""
        return float(self.student_rate if kind == "student" else self.rate)


class MomentumSGD:
    """
    v ← μ·v + g ;  p ← p − lr·v

    Con grad_clip > 0 el gradiente se reescala antes del update si su
    norma global (todos los parámetros juntos) supera grad_clip.
    """

    def __init__(self, params: list, rate: float, momentum: float, grad_clip: float = 0.0):
        self.params = list(params)
        self.rate = float(rate)
        self.momentum = float(momentum)
        self.grad_clip = float(grad_clip)
        self.velocity = [np.zeros_like(p.values) for p in self.params]

    def step(self):
        grads = [np.zeros_like(p.values) if p.grad is None else p.grad for p in self.params]
        if self.grad_clip > 0.0:
            norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads)))
            if norm > self.grad_clip:
                factor = self.grad_clip / norm
                grads = [g * factor for g in grads]

        for p, v, g in zip(self.params, self.velocity, grads):
            v *= self.momentum
            v += g
            p.values = p.values - self.rate * v


@dataclass
class TrainingResult:
    """Red entrenada + un registro por época y split."""

    model: object
    history: list

    def curve(self, key: str, split: str = "train") -> list:
        return [r[key] for r in self.history if r["split"] == split]

    def final(self, split: str = "test") -> dict:
        rows = [r for r in self.history if r["split"] == split]
        return rows[-1] if rows else {}


def make_batches(n: int, batch_size: int, rng) -> list:
    """
    Permutación de [0, n) cortada en lotes de batch_size.

    Un lote final más chico que MIN_RELATION_BATCH se une al anterior,
    así todos los lotes admiten pares y tripletas.
    """
    order = rng.permutation(n)
    batches = [order[i : i + batch_size] for i in range(0, n, batch_size)]
    if len(batches) > 1 and batches[-1].shape[0] < config.MIN_RELATION_BATCH:
        tail = batches.pop()
        batches[-1] = np.concatenate([batches[-1], tail])
    return batches


def mean_breakdown(breakdowns: list) -> DaskBreakdown:
    return DaskBreakdown(
        **{name: float(np.mean([getattr(b, name) for b in breakdowns])) for name in BREAKDOWN_FIELDS}
    )


def _record(epoch: int, split: str, breakdown: DaskBreakdown, labels, logits) -> dict:
    metrics = classification_metrics(labels, np.argmax(logits, axis=1), classes=logits.shape[1])
    return {"epoch": epoch, "split": split, **breakdown.as_record(), **metrics.as_record()}


def _ce_only(output, labels) -> tuple:
    ce = cross_entropy(output.logits, labels)
    value = ce.item()
    return ce, DaskBreakdown(ce=value, kd=0.0, distance=0.0, angle=0.0, semantic=0.0, total=value)


def _check_finite(breakdown: DaskBreakdown, epoch: int, where: str):
    if not np.isfinite(breakdown.total):
        raise TrainingError(
            f"Pérdida no finita ({breakdown.total}) en la época {epoch} ({where}); "
            f"probar con un rate menor",
            epoch=epoch,
        )


def _fit(model, data, cfg: TrainConfig, batch_loss, title: str, verbose: bool, dropout_rng=None):
    """
    Bucle común de entrenamiento.

    Args:
        data: EncodedDataset; cada red consume la vista de su tipo
        batch_loss: (output, indices, split, relation_seed) → (Tensor, DaskBreakdown)
    """
    train_x = data.train.view(model.kind)
    train_y = data.train.labels
    test_x = data.test.view(model.kind)
    test_y = data.test.labels
    if train_x.shape[0] < config.MIN_RELATION_BATCH:
        raise InvalidInputError(
            f"El split de train necesita al menos {config.MIN_RELATION_BATCH} ejemplos"
        )

    optimizer = MomentumSGD(model.parameters(), cfg.rate_for(model.kind), cfg.momentum, cfg.grad_clip)
    shuffle_rng = np.random.default_rng([cfg.seed, 2])
    history = []

    if verbose:
        print(f"\n🚀 {title}: {model!r}")

    for epoch in range(1, cfg.epochs + 1):
        breakdowns = []
        for step, indices in enumerate(make_batches(train_x.shape[0], cfg.batch_size, shuffle_rng)):
            model.zero_grad()
            with Tape() as tape:
                output = model.forward(train_x[indices], training=True, rng=dropout_rng)
                total, breakdown = batch_loss(output, indices, "train", [cfg.seed, 3, epoch, step])
            _check_finite(breakdown, epoch, f"lote {step}")
            tape.backward(total)
            optimizer.step()
            breakdowns.append(breakdown)

        train_logits = model.forward(train_x).logits.values
        history.append(_record(epoch, "train", mean_breakdown(breakdowns), train_y, train_logits))

        test_output = model.forward(test_x)
        _, test_breakdown = batch_loss(test_output, np.arange(test_x.shape[0]), "test", [cfg.seed, 5, epoch])
        _check_finite(test_breakdown, epoch, "test")
        history.append(_record(epoch, "test", test_breakdown, test_y, test_output.logits.values))

        if verbose:
            train_row, test_row = history[-2], history[-1]
            print(
                f"\r\033[K   ⏳ Época {epoch:>3}/{cfg.epochs} | loss {train_row['loss_total']:.4f} "
                f"| acc train {train_row['accuracy']:.3f} | acc test {test_row['accuracy']:.3f}",
                end="" if epoch < cfg.epochs else "\n",
                flush=True,
            )

    if cfg.checkpoint_path:
        save_checkpoint(model, cfg.checkpoint_path)
        if verbose:
            print(f"   💾 Checkpoint: {cfg.checkpoint_path}")

    return TrainingResult(model=model, history=history)


# =========================================================================
# PROTOCOLO
# =========================================================================


def build_teacher(data, cfg: TrainConfig) -> TeacherNet:
    return TeacherNet(
        data.input_dim,
        hidden=cfg.teacher_hidden,
        classes=_classes(data),
        seed=cfg.seed,
        dropout=cfg.teacher_dropout,
    )


def build_student(data, cfg: TrainConfig, teacher_dim: int) -> StudentNet:
    return StudentNet(
        data.input_dim,
        hidden=cfg.student_hidden,
        classes=_classes(data),
        seed=cfg.seed,
        teacher_dim=teacher_dim,
    )


def _classes(data) -> int:
    return int(max(data.train.labels.max(), data.test.labels.max())) + 1


def train_teacher(data, cfg: TrainConfig = TrainConfig(), verbose: bool = False) -> TrainingResult:
    """
    Entrena el teacher con cross-entropy sobre la vista teacher.

    Args:
        data: EncodedDataset (training/dataset.py)

    Raises:
        TrainingError: Si la pérdida deja de ser finita (el mensaje nombra la época)
    """
    teacher = build_teacher(data, cfg)
    labels = {"train": data.train.labels, "test": data.test.labels}

    def batch_loss(output, indices, split, relation_seed):
        return _ce_only(output, labels[split][indices])

    return _fit(
        teacher,
        data,
        cfg,
        batch_loss,
        "Entrenando teacher",
        verbose,
        dropout_rng=np.random.default_rng([cfg.seed, 4]),
    )


def train_student_baseline(
    data, cfg: TrainConfig = TrainConfig(), teacher_dim: int | None = None, verbose: bool = False
) -> TrainingResult:
    """Student solo con cross-entropy (mismas semillas y lotes que distill_student)."""
    teacher_dim = cfg.teacher_hidden[1] if teacher_dim is None else teacher_dim
    student = build_student(data, cfg, teacher_dim)
    labels = {"train": data.train.labels, "test": data.test.labels}

    def batch_loss(output, indices, split, relation_seed):
        return _ce_only(output, labels[split][indices])

    return _fit(student, data, cfg, batch_loss, "Entrenando student baseline", verbose)


def teacher_outputs(teacher, images: np.ndarray) -> tuple:
    """Logits y features del teacher (sin cinta, sin dropout)."""
    output = teacher.forward(images)
    return output.logits.values, output.features.values


def distill_student(data, teacher, cfg: TrainConfig = TrainConfig(), verbose: bool = False) -> TrainingResult:
    """
    Entrena el student con DASK contra el teacher congelado.

    El teacher solo se evalúa (antes del bucle) sobre la vista teacher;
    sus parámetros no reciben gradientes ni updates.
    """
    student = build_student(data, cfg, teacher.feature_dim)
    dask_cfg = cfg.dask
    frozen = {
        "train": teacher_outputs(teacher, data.train.view("teacher")),
        "test": teacher_outputs(teacher, data.test.view("teacher")),
    }
    labels = {"train": data.train.labels, "test": data.test.labels}

    def batch_loss(output, indices, split, relation_seed):
        t_logits, t_features = frozen[split]
        batch = DistillBatch(
            teacher_logits=Tensor(t_logits[indices]),
            student_logits=output.logits,
            teacher_features=Tensor(t_features[indices]),
            student_features=output.features,
            labels=labels[split][indices],
            student_projected=output.projected,
        )
        loss_cfg = dask_cfg
        if loss_cfg.uses_relations and batch.size < 3:
            # Split de test diminuto: sin tripletas posibles
            loss_cfg = replace(loss_cfg, beta=0.0)
        pairs = triplets = None
        if loss_cfg.uses_relations:
            pairs, triplets = sample_relations(
                batch.size, loss_cfg.pair_limit, loss_cfg.triplet_limit, relation_seed
            )
        return dask_total(batch, loss_cfg, pairs, triplets)

    return _fit(student, data, cfg, batch_loss, "Destilando student (DASK)", verbose)
