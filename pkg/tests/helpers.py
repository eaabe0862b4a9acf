"""
Funciones helper compartidas para todos los tests.

Proporciona specs y configuraciones chicas (entrenamientos de segundos),
lotes aleatorios sembrados y el bucle común de ejecución de cada módulo
de tests, evitando repetir constantes en cada archivo.
"""

import os
import sys
from functools import lru_cache

import numpy as np

# Agregar directorio raíz al path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from losses.dask import DaskConfig, DistillBatch
from training.dataset import SyntheticHarSpec, encode_dataset, generate_dataset
from training.trainer import TrainConfig

# Dimensiones de las corridas chicas
TINY_SIDE = 8
TINY_WINDOW = 32
TINY_CLASSES = 3
TINY_SAMPLES = 10


def tiny_spec(seed: int = 0, **overrides) -> SyntheticHarSpec:
    """Dataset de 3 clases × 10 ejemplos, ventanas de 32 muestras."""
    values = {
        "classes": TINY_CLASSES,
        "window_length": TINY_WINDOW,
        "samples_per_class": TINY_SAMPLES,
        "seed": seed,
    }
    values.update(overrides)
    return SyntheticHarSpec(**values)


def tiny_train_config(seed: int = 0, **overrides) -> TrainConfig:
    """Redes angostas, 2 épocas, lotes de 8 (entradas de 192 valores: mismo paso para las dos redes)."""
    values = {
        "rate": 0.05,
        "student_rate": 0.05,
        "momentum": 0.9,
        "epochs": 2,
        "batch_size": 8,
        "seed": seed,
        "teacher_hidden": (16, 8),
        "student_hidden": (8, 4),
        "dask": DaskConfig(pair_limit=32, triplet_limit=32),
    }
    values.update(overrides)
    return TrainConfig(**values)


@lru_cache(maxsize=4)
def tiny_dataset(seed: int = 0, side: int = TINY_SIDE):
    """Dataset chico ya codificado (cacheado: lo comparten varios tests)."""
    return encode_dataset(generate_dataset(tiny_spec(seed)), side)


def random_batch(seed: int = 0, m: int = 8, classes: int = 6, student_dim: int = 16, teacher_dim: int = 16):
    """
    DistillBatch aleatorio sembrado (sin grafo: todos los tensores son hojas).

    Returns:
        DistillBatch con student_projected de ancho teacher_dim
    """
    rng = np.random.default_rng(seed)
    return DistillBatch(
        teacher_logits=rng.normal(size=(m, classes)) * 2.0,
        student_logits=rng.normal(size=(m, classes)) * 2.0,
        teacher_features=rng.normal(size=(m, teacher_dim)),
        student_features=rng.normal(size=(m, student_dim)),
        labels=rng.integers(0, classes, size=m),
        student_projected=rng.normal(size=(m, teacher_dim)),
    )


def write_text(directory, name: str, text: str) -> str:
    path = os.path.join(str(directory), name)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return path


def run_test_functions(title: str, tests: list) -> bool:
    """
    Ejecuta una lista de tests estilo assert y reporta fallos.

    Returns:
        bool: True si todos pasaron
    """
    print("=" * 70)
    print(f"🧪 {title}")
    print("=" * 70)

    failed = 0
    for test_func in tests:
        try:
            test_func()
        except AssertionError as e:
            print(f"\n❌ FALLO: {test_func.__name__}")
            print(f"   {e}")
            failed += 1
        except Exception as e:
            print(f"\n❌ ERROR: {test_func.__name__}")
            print(f"   {type(e).__name__}: {e}")
            failed += 1

    print("\n" + "=" * 70)
    if failed == 0:
        print("✅ TODOS LOS TESTS PASARON")
    else:
        print(f"❌ {failed} TEST(S) FALLARON")
    print("=" * 70)
    return failed == 0
