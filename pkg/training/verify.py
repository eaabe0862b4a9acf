"""
Suite de verificación de gradientes (subcomando gradcheck).

Para cada operación y cada semilla se arma un punto aleatorio y se
compara el gradiente de la cinta contra diferencias centrales respecto
de cada matriz de entrada (o cada parámetro, para las redes). El error
reportado por operación es el máximo sobre entradas y semillas.

Convenciones:
- μ de L_D se congela en el valor del punto base (no fluye gradiente por μ)
- las redes se muestrean evitando kinks de relu: se rechazan puntos con
  alguna preactivación a menos de KINK_MARGIN de 0
"""

import numpy as np

import config
import autodiff as ad
from autodiff import grad_check
from errors import InvalidInputError, VerificationError
from losses.dask import DaskConfig, DistillBatch, cross_entropy, dask_total, kd_soft_loss, semantic_loss
from losses.relational import angle_loss, distance_loss, mean_distance, sample_relations
from models.student import StudentNet
from models.teacher import TeacherNet

KINK_MARGIN = 1e-2
MAX_KINK_RETRIES = 50

# Dimensiones chicas: la verificación es O(coordenadas) evaluaciones
LOSS_M, LOSS_K, LOSS_D = 6, 4, 5
TOTAL_M, TOTAL_K, TOTAL_DS, TOTAL_DT = 8, 6, 8, 12
NET_M, NET_INPUT, NET_CLASSES = 5, 12, 3


def _max_over_inputs(fn, inputs: list, step: float) -> float:
    """grad_check de fn respecto de cada entrada, dejando las demás fijas."""
    worst = 0.0
    for position in range(len(inputs)):

        def partial(t, position=position):
            args = list(inputs)
            args[position] = t
            return fn(*args)

        worst = max(worst, grad_check(partial, inputs[position], step))
    return worst


def _labels(rng, m: int, k: int) -> np.ndarray:
    return rng.integers(0, k, size=m)


def check_cross_entropy(rng, step):
    labels = _labels(rng, LOSS_M, LOSS_K)
    logits = rng.normal(size=(LOSS_M, LOSS_K))
    return grad_check(lambda t: cross_entropy(t, labels), logits, step)


def check_kd_soft_loss(rng, step):
    teacher = rng.normal(size=(LOSS_M, LOSS_K)) * 3.0
    student = rng.normal(size=(LOSS_M, LOSS_K)) * 3.0
    return _max_over_inputs(lambda t, s: kd_soft_loss(t, s, config.TEMPERATURE), [teacher, student], step)


def check_distance_loss(rng, step):
    teacher = rng.normal(size=(LOSS_M, LOSS_D))
    student = rng.normal(size=(LOSS_M, LOSS_D))
    pairs, _ = sample_relations(LOSS_M, config.PAIR_LIMIT, config.TRIPLET_LIMIT, rng.integers(2**32))
    mu_t = mean_distance(teacher, pairs)
    mu_s = mean_distance(student, pairs)

    def fn(t, s):
        return distance_loss(t, s, pairs, config.HUBER_DELTA, teacher_mu=mu_t, student_mu=mu_s)

    return _max_over_inputs(fn, [teacher, student], step)


def check_angle_loss(rng, step):
    teacher = rng.normal(size=(LOSS_M, LOSS_D))
    student = rng.normal(size=(LOSS_M, LOSS_D))
    _, triplets = sample_relations(LOSS_M, config.PAIR_LIMIT, config.TRIPLET_LIMIT, rng.integers(2**32))
    return _max_over_inputs(
        lambda t, s: angle_loss(t, s, triplets, config.HUBER_DELTA), [teacher, student], step
    )


def check_semantic_loss(rng, step):
    teacher = rng.normal(size=(LOSS_M, LOSS_D))
    student = rng.normal(size=(LOSS_M, LOSS_D))
    return _max_over_inputs(semantic_loss, [teacher, student], step)


def check_dask_total(rng, step):
    labels = _labels(rng, TOTAL_M, TOTAL_K)
    inputs = [
        rng.normal(size=(TOTAL_M, TOTAL_K)) * 2.0,  # teacher_logits
        rng.normal(size=(TOTAL_M, TOTAL_K)) * 2.0,  # student_logits
        rng.normal(size=(TOTAL_M, TOTAL_DT)),  # teacher_features
        rng.normal(size=(TOTAL_M, TOTAL_DS)),  # student_features
        rng.normal(size=(TOTAL_M, TOTAL_DT)),  # student_projected
    ]
    pairs, triplets = sample_relations(TOTAL_M, config.PAIR_LIMIT, config.TRIPLET_LIMIT, rng.integers(2**32))
    frozen_mu = (mean_distance(inputs[2], pairs), mean_distance(inputs[3], pairs))
    cfg = DaskConfig(alpha=1.0, beta=1.0, gamma=1.0, temperature=config.TEMPERATURE, huber_delta=config.HUBER_DELTA)

    def fn(t_logits, s_logits, t_features, s_features, s_projected):
        batch = DistillBatch(
            teacher_logits=t_logits,
            student_logits=s_logits,
            teacher_features=t_features,
            student_features=s_features,
            labels=labels,
            student_projected=s_projected,
        )
        total, _ = dask_total(batch, cfg, pairs, triplets, frozen_mu=frozen_mu)
        return total

    return _max_over_inputs(fn, inputs, step)


def _kink_free(net, x) -> bool:
    output = net.forward(x)
    return all(np.min(np.abs(z.values)) > KINK_MARGIN for z in output.preactivations)


def _check_network(build, rng, step):
    """Red chica + entrada sin kinks; verifica entrada y cada parámetro."""
    for _ in range(MAX_KINK_RETRIES):
        net = build(int(rng.integers(2**31)))
        for p in net.parameters():
            if p.ndim == 1:
                p.values = rng.normal(size=p.shape) * 0.5
        x = rng.normal(size=(NET_M, NET_INPUT))
        if _kink_free(net, x):
            break
    else:
        raise VerificationError(f"No se encontró un punto sin kinks para {build.__name__}")

    out = net.forward(x)
    weights = {
        "logits": rng.normal(size=out.logits.shape),
        "features": rng.normal(size=out.features.shape),
    }
    if out.projected is not None:
        weights["projected"] = rng.normal(size=out.projected.shape)

    def readout(output):
        total = ad.sum_(output.logits * weights["logits"]) + ad.sum_(output.features * weights["features"])
        if output.projected is not None:
            total = total + ad.sum_(output.projected * weights["projected"])
        return total

    worst = grad_check(lambda t: readout(net.forward(t)), x, step)
    for name in net.layer_shapes():
        worst = max(
            worst,
            grad_check(lambda t, name=name: readout(net.with_params(**{name: t}).forward(x)), net.params[name], step),
        )
    return worst


def _small_teacher(seed):
    return TeacherNet(NET_INPUT, hidden=(8, 6), classes=NET_CLASSES, seed=seed)


def _small_student(seed):
    return StudentNet(NET_INPUT, hidden=(5, 4), classes=NET_CLASSES, seed=seed, teacher_dim=6)


def check_teacher_forward(rng, step):
    return _check_network(_small_teacher, rng, step)


def check_student_forward(rng, step):
    return _check_network(_small_student, rng, step)


GRADCHECK_OPERATIONS = {
    "cross_entropy": check_cross_entropy,
    "kd_soft_loss": check_kd_soft_loss,
    "distance_loss": check_distance_loss,
    "angle_loss": check_angle_loss,
    "semantic_loss": check_semantic_loss,
    "dask_total": check_dask_total,
    "teacher_forward": check_teacher_forward,
    "student_forward": check_student_forward,
}


def run_gradcheck(
    seeds: int = config.GRADCHECK_SEEDS,
    base_seed: int = config.SEED,
    step: float = config.GRADCHECK_STEP,
    operations=None,
) -> dict:
    """
    Corre la suite completa.

    Returns:
        dict: operación → máximo error relativo sobre las semillas
    """
    if int(seeds) < 1:
        raise InvalidInputError(f"seeds debe ser ≥ 1 (recibido {seeds})")
    names = list(GRADCHECK_OPERATIONS) if operations is None else list(operations)
    report = {}
    order = list(GRADCHECK_OPERATIONS)
    for name in names:
        check = GRADCHECK_OPERATIONS[name]
        index = order.index(name)
        report[name] = max(
            check(np.random.default_rng([int(base_seed), index, s]), step) for s in range(int(seeds))
        )
    return report


def failing_operations(report: dict, threshold: float = config.GRADCHECK_THRESHOLD) -> list:
    # NaN también falla
    return [name for name, error in report.items() if not error < threshold]


def assert_gradients(report: dict, threshold: float = config.GRADCHECK_THRESHOLD):
    """
    Raises:
        VerificationError: Si alguna operación supera el umbral (las nombra)
    """
    failing = failing_operations(report, threshold)
    if failing:
        detail = ", ".join(f"{name}={report[name]:.3e}" for name in failing)
        raise VerificationError(f"Gradientes fuera de tolerancia {threshold:g}: {detail}", failing=failing)
