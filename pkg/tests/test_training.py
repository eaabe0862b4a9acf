"""
Tests del protocolo de entrenamiento, métricas, dataset sintético,
ablación y suite de verificación de gradientes.

Usa el dataset chico de helpers.py (3 clases × 10 ejemplos, side 8):
cada entrenamiento tarda segundos. Acá no se afirma ninguna ganancia de
accuracy (con tan pocos datos el resultado es ruido); las metas de
accuracy con la configuración por defecto están en test_acceptance.py.
"""

import os
import sys
from dataclasses import replace

import numpy as np

# Agregar directorio raíz al path
TESTS_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.dirname(TESTS_DIR))
sys.path.insert(0, TESTS_DIR)

import config
from errors import InvalidInputError, TrainingError, VerificationError
from helpers import TINY_CLASSES, TINY_SAMPLES, run_test_functions, tiny_dataset, tiny_spec, tiny_train_config
from losses.dask import DaskConfig
from training.ablation import directional_checks, run_ablation
from training.dataset import SyntheticHarSpec, generate_dataset
from training.metrics import classification_metrics, evaluate_split
from training.trainer import (
    TrainConfig,
    build_student,
    build_teacher,
    distill_student,
    make_batches,
    train_student_baseline,
    train_teacher,
)
from training.verify import assert_gradients, failing_operations, run_gradcheck

RECORD_KEYS = {"epoch", "split", "loss_total", "loss_ce", "loss_kd", "loss_d", "loss_a", "loss_s", "accuracy", "f1"}


def same_state(a, b) -> bool:
    sa, sb = a.state_dict(), b.state_dict()
    return list(sa) == list(sb) and all(np.array_equal(sa[k], sb[k]) for k in sa)


# === LOTES Y CONFIGURACIÓN ===


def test_make_batches_merges_tail():
    print("\n=== TEST 1: make_batches ===")

    batches = make_batches(10, 4, np.random.default_rng(0))
    assert [b.shape[0] for b in batches] == [4, 6]
    assert sorted(np.concatenate(batches).tolist()) == list(range(10))

    batches = make_batches(12, 4, np.random.default_rng(0))
    assert [b.shape[0] for b in batches] == [4, 4, 4]
    print("✅ la cola de 2 se une al lote anterior")


def test_train_config_validation():
    for overrides in ({"rate": -0.1}, {"student_rate": -0.1}, {"momentum": 1.0}, {"epochs": 0}, {"batch_size": 3}, {"grad_clip": -1.0}):
        try:
            TrainConfig(**overrides)
            assert False, f"{overrides} debería fallar"
        except InvalidInputError:
            pass


# === MÉTRICAS ===


def test_metrics_examples():
    print("\n=== TEST 2: Métricas ===")

    perfect = classification_metrics([0, 1, 2, 1], [0, 1, 2, 1])
    assert perfect.accuracy == 1.0 and perfect.f1 == 1.0

    one_class = classification_metrics([0, 0, 1, 1], [0, 0, 0, 0], classes=2)
    assert one_class.accuracy == 0.5
    assert abs(one_class.f1 - 1.0 / 3.0) < 1e-12
    assert one_class.confusion.tolist() == [[2, 0], [2, 0]]
    assert one_class.confusion.sum() == 4

    try:
        classification_metrics([], [])
        assert False, "Split vacío debería fallar"
    except InvalidInputError:
        pass
    print("✅ perfecto → 1.0, una sola clase en K=2 → F1 1/3, vacío → error")


# === DATASET ===


def test_dataset_deterministic():
    print("\n=== TEST 3: Dataset sintético ===")

    a = generate_dataset(tiny_spec(seed=4))
    b = generate_dataset(tiny_spec(seed=4))
    assert np.array_equal(a.train.labels, b.train.labels)
    for wa, wb in zip(a.train.student_windows, b.train.student_windows):
        assert np.array_equal(wa.samples_x, wb.samples_x)
        assert np.array_equal(wa.samples_z, wb.samples_z)

    c = generate_dataset(tiny_spec(seed=5))
    assert not np.array_equal(a.train.teacher_windows[0].samples_x, c.train.teacher_windows[0].samples_x)
    print("✅ misma spec → mismo dataset bit a bit")


def test_dataset_split_is_stratified():
    ds = generate_dataset(tiny_spec(seed=1))
    assert len(ds.train) + len(ds.test) == TINY_CLASSES * TINY_SAMPLES
    train_counts = np.bincount(ds.train.labels, minlength=TINY_CLASSES)
    test_counts = np.bincount(ds.test.labels, minlength=TINY_CLASSES)
    assert train_counts.tolist() == [8] * TINY_CLASSES
    assert test_counts.tolist() == [2] * TINY_CLASSES


def test_zero_noise_views_match():
    ds = generate_dataset(tiny_spec(seed=2, teacher_noise=0.0, student_noise=0.0))
    for t, s in zip(ds.train.teacher_windows, ds.train.student_windows):
        assert np.array_equal(t.samples_x, s.samples_x)
        assert np.array_equal(t.samples_y, s.samples_y)


def test_spec_validation():
    for overrides in ({"classes": 1}, {"samples_per_class": 4}, {"teacher_noise": 0.3, "student_noise": 0.2}):
        try:
            SyntheticHarSpec(**{"samples_per_class": 10, **overrides})
            assert False, f"{overrides} debería fallar"
        except InvalidInputError:
            pass


def test_encoded_dataset_shapes():
    data = tiny_dataset()
    assert data.input_dim == 8 * 8 * 3
    assert data.train.teacher_images.shape == (24, data.input_dim)
    assert data.test.student_images.shape == (6, data.input_dim)
    assert np.all(np.abs(data.train.teacher_images) <= 1.0 + 1e-12)


# === ENTRENAMIENTO ===


def test_teacher_training_deterministic():
    print("\n=== TEST 4: Determinismo del teacher ===")

    data = tiny_dataset()
    cfg = tiny_train_config(seed=0)
    a = train_teacher(data, cfg)
    b = train_teacher(data, cfg)
    assert a.history == b.history
    assert same_state(a.model, b.model)
    print("✅ mismas semillas → historia y parámetros idénticos")


def test_zero_rate_keeps_parameters():
    print("\n=== TEST 5: rate = 0 ===")

    data = tiny_dataset()
    cfg = tiny_train_config(seed=3, rate=0.0, epochs=1)
    result = train_teacher(data, cfg)
    assert same_state(result.model, build_teacher(data, cfg))
    print("✅ parámetros iguales a la inicialización")


def test_student_rate_applies_to_student_only():
    """student_rate = 0 congela al student; el teacher sigue usando rate."""
    print("\n=== TEST 5b: Paso del student ===")

    data = tiny_dataset()
    cfg = tiny_train_config(seed=3, epochs=1, student_rate=0.0)
    assert cfg.rate_for("teacher") == 0.05 and cfg.rate_for("student") == 0.0
    assert TrainConfig().rate_for("student") == config.STUDENT_LEARNING_RATE
    assert TrainConfig().rate_for("teacher") == config.LEARNING_RATE

    teacher = train_teacher(data, cfg).model
    assert not same_state(teacher, build_teacher(data, cfg))
    student = train_student_baseline(data, cfg, teacher_dim=teacher.feature_dim).model
    assert same_state(student, build_student(data, cfg, teacher.feature_dim))
    print("✅ el teacher se mueve y el student queda en su inicialización")


def test_history_records():
    print("\n=== TEST 6: Registros por época ===")

    data = tiny_dataset()
    result = train_teacher(data, tiny_train_config(epochs=3))
    assert len(result.history) == 6
    for record in result.history:
        assert set(record) == RECORD_KEYS
        assert 0.0 <= record["accuracy"] <= 1.0 and 0.0 <= record["f1"] <= 1.0
    assert [r["epoch"] for r in result.history] == [1, 1, 2, 2, 3, 3]
    assert [r["split"] for r in result.history] == ["train", "test"] * 3
    assert result.curve("loss_total", "test") == [r["loss_total"] for r in result.history[1::2]]
    assert result.final("test") is result.history[-1]
    print("✅ 2 registros por época con todas las claves")


def test_teacher_frozen_during_distillation():
    print("\n=== TEST 7: Teacher congelado ===")

    data = tiny_dataset()
    cfg = tiny_train_config()
    teacher = train_teacher(data, cfg).model
    before = teacher.state_dict()
    distill_student(data, teacher, cfg)
    after = teacher.state_dict()
    assert all(np.array_equal(before[k], after[k]) for k in before)
    print("✅ parámetros del teacher intactos")


def test_baseline_matches_zero_weight_distillation():
    """α = β = γ = 0 reproduce el baseline: mismas curvas y parámetros."""
    print("\n=== TEST 8: Baseline ≡ DASK con pesos en 0 ===")

    data = tiny_dataset()
    cfg = tiny_train_config(seed=1)
    teacher = train_teacher(data, cfg).model

    baseline = train_student_baseline(data, cfg, teacher_dim=teacher.feature_dim)
    zero_cfg = replace(cfg, dask=DaskConfig(alpha=0.0, beta=0.0, gamma=0.0, pair_limit=32, triplet_limit=32))
    distilled = distill_student(data, teacher, zero_cfg)

    assert baseline.history == distilled.history
    assert same_state(baseline.model, distilled.model)
    print("✅ curvas idénticas")


def test_breakdown_sums_to_total():
    print("\n=== TEST 9: Desglose de la pérdida ===")

    data = tiny_dataset()
    cfg = tiny_train_config(seed=2)
    teacher = train_teacher(data, cfg).model
    result = distill_student(data, teacher, cfg)
    dask = cfg.dask
    for record in result.history:
        weighted = (
            record["loss_ce"]
            + dask.alpha * record["loss_kd"]
            + dask.beta * (record["loss_d"] + record["loss_a"])
            + dask.gamma * record["loss_s"]
        )
        assert abs(weighted - record["loss_total"]) < 1e-12, record
        assert record["loss_kd"] >= 0.0 and record["loss_s"] >= 0.0
    print("✅ total == CE + α·KD + β·(D + A) + γ·S en cada registro")


def test_distillation_checkpoint_and_eval():
    """El checkpoint reproduce la accuracy final registrada."""
    import tempfile

    from training.checkpoint import load_checkpoint

    data = tiny_dataset()
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "student.bin")
        cfg = tiny_train_config(seed=4, checkpoint_path=path)
        teacher = train_teacher(data, replace(cfg, checkpoint_path=None)).model
        result = distill_student(data, teacher, cfg)
        restored = load_checkpoint(path)
        metrics = evaluate_split(restored, data.test)
        assert metrics.accuracy == result.final("test")["accuracy"]
        assert metrics.f1 == result.final("test")["f1"]


def test_divergence_raises_training_error():
    print("\n=== TEST 10: Divergencia ===")

    data = tiny_dataset()
    images = data.train.teacher_images.copy()
    images[0, 0] = np.nan
    corrupted = replace(data, train=replace(data.train, teacher_images=images))
    try:
        train_teacher(corrupted, tiny_train_config())
        assert False, "Debería lanzar TrainingError"
    except TrainingError as e:
        assert e.epoch == 1
        assert "época 1" in str(e)
    print("✅ TrainingError nombra la época")


# === ABLACIÓN ===


def test_ablation_table():
    print("\n=== TEST 11: Ablación ===")

    data = tiny_dataset()
    cfg = tiny_train_config(seed=0, epochs=1)
    teacher = train_teacher(data, cfg).model
    result = run_ablation(data, teacher, cfg)

    table = result.table()
    assert table["variant"].tolist() == config.ABLATION_ORDER
    assert set(table["seed"]) == {0}
    assert table["accuracy"].between(0.0, 1.0).all()

    dak = result.runs[("dak", 0)]
    assert all(r["loss_s"] == 0.0 for r in dak.history)
    baseline = result.runs[("baseline", 0)]
    assert all(r["loss_kd"] == r["loss_d"] == r["loss_a"] == r["loss_s"] == 0.0 for r in baseline.history)
    ask = result.runs[("ask", 0)]
    assert all(r["loss_d"] == 0.0 for r in ask.history)

    summary = result.summary()
    assert summary["variant"].tolist() == config.ABLATION_ORDER
    assert (summary["runs"] == 1).all()

    checks = directional_checks(summary)
    assert {c["check"] for c in checks} >= {"dask - baseline >= 1.0"}
    assert all(isinstance(c["passed"], (bool, np.bool_)) for c in checks)
    print(f"✅ {len(table)} variantes con la misma semilla")


# === VERIFICACIÓN DE GRADIENTES ===


def test_gradcheck_subset_passes():
    print("\n=== TEST 12: Suite de gradientes ===")

    report = run_gradcheck(seeds=1, operations=["cross_entropy", "kd_soft_loss", "semantic_loss", "dask_total"])
    assert failing_operations(report) == [], report
    assert_gradients(report)
    for name, error in report.items():
        print(f"   ✅ {name}: {error:.2e}")


def test_gradcheck_reports_failures():
    report = {"cross_entropy": 1e-9, "angle_loss": float("nan"), "dask_total": 0.5}
    assert failing_operations(report) == ["angle_loss", "dask_total"]
    try:
        assert_gradients(report)
        assert False, "Debería lanzar VerificationError"
    except VerificationError as e:
        assert e.failing == ["angle_loss", "dask_total"]
        assert "dask_total" in str(e)


def run_all_tests():
    return run_test_functions(
        "TESTS DE ENTRENAMIENTO",
        [
            test_make_batches_merges_tail,
            test_train_config_validation,
            test_metrics_examples,
            test_dataset_deterministic,
            test_dataset_split_is_stratified,
            test_zero_noise_views_match,
            test_spec_validation,
            test_encoded_dataset_shapes,
            test_teacher_training_deterministic,
            test_zero_rate_keeps_parameters,
            test_student_rate_applies_to_student_only,
            test_history_records,
            test_teacher_frozen_during_distillation,
            test_baseline_matches_zero_weight_distillation,
            test_breakdown_sums_to_total,
            test_distillation_checkpoint_and_eval,
            test_divergence_raises_training_error,
            test_ablation_table,
            test_gradcheck_subset_passes,
            test_gradcheck_reports_failures,
        ],
    )


if __name__ == "__main__":
    sys.exit(0 if run_all_tests() else 1)
