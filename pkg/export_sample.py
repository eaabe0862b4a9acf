"""
export_sample.py - Exporta ventanas sintéticas al esquema CSV de `encode`

Uso:
    python export_sample.py <view> [samples_per_class] [seed]

Ejemplo:
    python export_sample.py student 5 0
    python vskd.py encode samples/synthetic_student_sample.csv --format raw
"""

import sys
from pathlib import Path

import numpy as np

import config
from encoding.ingest import windows_to_frame
from training.dataset import SyntheticHarSpec, generate_dataset


def export_synthetic_sample(view: str = "student", samples_per_class: int = 5, seed: int = config.SEED, path=None) -> Path:
    """
    Escribe un CSV timestamp,ax,ay,az,label con ventanas del dataset sintético.

    Las ventanas quedan consecutivas (train y luego test). `encode` con el
    mismo window_length recupera exactos los valores ax, ay, az y el label
    de cada ventana; los timestamps NO: se reescriben como una sola
    secuencia global i / sample_rate, sin cortes entre ventanas.

    Args:
        view: 'teacher' o 'student'
        samples_per_class: ejemplos por clase a generar
        seed: semilla del generador
        path: archivo destino (default: samples/synthetic_<view>_sample.csv)

    Returns:
        Path: archivo escrito
    """
    spec = SyntheticHarSpec(samples_per_class=samples_per_class, seed=seed)
    dataset = generate_dataset(spec)
    windows = dataset.train.view(view) + dataset.test.view(view)

    print(f"📥 Generando {len(windows)} ventanas (vista {view}, seed {seed})...")
    frame = windows_to_frame(windows)
    frame["timestamp"] = np.arange(len(frame), dtype=np.float64) / spec.sample_rate

    if path is None:
        samples_dir = Path("samples")
        samples_dir.mkdir(exist_ok=True)
        path = samples_dir / f"synthetic_{view}_sample.csv"
    path = Path(path)
    frame.to_csv(path, index=False, float_format="%.17g")

    print(f"✅ Exportadas {len(windows)} ventanas de {spec.window_length} muestras")
    print(f"📄 Archivo: {path}")
    print(f"📊 Tamaño: {path.stat().st_size / 1024:.2f} KB")
    return path


if __name__ == "__main__":
    # Argumentos por línea de comandos
    if len(sys.argv) < 2 or sys.argv[1] not in ("teacher", "student"):
        print("Uso: python export_sample.py <teacher|student> [samples_per_class] [seed]")
        print("Ejemplo: python export_sample.py student 5 0")
        sys.exit(config.EXIT_INPUT)

    view = sys.argv[1]
    samples_per_class = int(sys.argv[2]) if len(sys.argv) > 2 else 5
    seed = int(sys.argv[3]) if len(sys.argv) > 3 else config.SEED

    export_synthetic_sample(view, samples_per_class, seed)
