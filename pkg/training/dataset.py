"""
Dataset HAR sintético con dos vistas por ejemplo.

Cada ejemplo es una señal triaxial limpia de la familia de su clase; la
vista teacher y la vista student son esa misma señal más ruido gaussiano
independiente (el student recibe más ruido: su modalidad es más pobre).

Familias de señal (clase c usa la familia c mod 6; c // 6 desplaza la banda):

    0: sinusoide de baja frecuencia     (0.5–1.0 Hz)
    1: sinusoide de frecuencia media    (2.0–3.0 Hz)
    2: sinusoide de alta frecuencia     (5.0–7.0 Hz)
    3: tren de impulsos espaciado       (período 0.8–1.2 s)
    4: tren de impulsos denso           (período 0.2–0.3 s)
    5: deriva de caminata aleatoria

Todo sale de un único numpy Generator sembrado con spec.seed, en orden
fijo, así la misma spec produce datasets idénticos bit a bit.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.model_selection import train_test_split

import config
from encoding.gaf import SensorWindow, encode_windows
from errors import InvalidInputError

SIGNAL_FAMILIES = [
    "low_sinusoid",
    "mid_sinusoid",
    "high_sinusoid",
    "sparse_impulses",
    "dense_impulses",
    "random_walk",
]


@dataclass(frozen=True)
class SyntheticHarSpec:
    """
    Parámetros del generador.

    Attributes:
        classes: K ≥ 2
        window_length: muestras por ventana (≥ 2)
        samples_per_class: ejemplos por clase (≥ 5 para el split 80/20 estratificado)
        sample_rate: Hz
        teacher_noise, student_noise: desvío del ruido de cada vista
        seed: semilla del generador
    """

    classes: int = config.CLASSES
    window_length: int = config.WINDOW_LENGTH
    samples_per_class: int = config.SAMPLES_PER_CLASS
    sample_rate: float = config.SAMPLE_RATE_HZ
    teacher_noise: float = config.TEACHER_NOISE
    student_noise: float = config.STUDENT_NOISE
    seed: int = config.SEED

    def __post_init__(self):
        if int(self.classes) < 2:
            raise InvalidInputError(f"classes debe ser ≥ 2 (recibido {self.classes})")
        if int(self.window_length) < 2:
            raise InvalidInputError(f"window_length debe ser ≥ 2 (recibido {self.window_length})")
        if int(self.samples_per_class) < 5:
            raise InvalidInputError(
                f"samples_per_class debe ser ≥ 5 para el split estratificado (recibido {self.samples_per_class})"
            )
        if not float(self.sample_rate) > 0:
            raise InvalidInputError(f"sample_rate debe ser > 0 (recibido {self.sample_rate})")
        if float(self.teacher_noise) < 0 or float(self.student_noise) < 0:
            raise InvalidInputError("Los niveles de ruido deben ser ≥ 0")
        both_zero = float(self.teacher_noise) == 0.0 and float(self.student_noise) == 0.0
        if not both_zero and not float(self.student_noise) > float(self.teacher_noise):
            raise InvalidInputError(
                f"student_noise ({self.student_noise}) debe ser mayor que "
                f"teacher_noise ({self.teacher_noise})"
            )
        if int(self.seed) < 0:
            raise InvalidInputError(f"seed debe ser ≥ 0 (recibido {self.seed})")

    @property
    def total(self) -> int:
        return int(self.classes) * int(self.samples_per_class)


@dataclass(frozen=True)
class HarSplit:
    """Vistas emparejadas: teacher_windows[i] y student_windows[i] son el mismo ejemplo."""

    teacher_windows: list
    student_windows: list
    labels: np.ndarray

    def __len__(self):
        return len(self.teacher_windows)

    def view(self, kind: str) -> list:
        """Ventanas que consume una red ('teacher' o 'student')."""
        if kind == "teacher":
            return self.teacher_windows
        if kind == "student":
            return self.student_windows
        raise KeyError(f"Vista '{kind}' no existe; vistas disponibles: teacher, student")


@dataclass(frozen=True)
class HarDataset:
    train: HarSplit
    test: HarSplit
    spec: SyntheticHarSpec


@dataclass(frozen=True)
class EncodedSplit:
    """Imágenes GAF aplanadas (N, side²·3) de ambas vistas."""

    teacher_images: np.ndarray
    student_images: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return int(self.labels.shape[0])

    def view(self, kind: str) -> np.ndarray:
        if kind == "teacher":
            return self.teacher_images
        if kind == "student":
            return self.student_images
        raise KeyError(f"Vista '{kind}' no existe; vistas disponibles: teacher, student")


@dataclass(frozen=True)
class EncodedDataset:
    train: EncodedSplit
    test: EncodedSplit
    side: int

    @property
    def input_dim(self) -> int:
        return int(self.train.teacher_images.shape[1])


# =========================================================================
# SEÑALES
# =========================================================================


def _sinusoid(t, rng, low, high):
    freq = rng.uniform(low, high)
    amplitude = rng.uniform(0.8, 1.2)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    return amplitude * np.sin(2.0 * np.pi * freq * t + phase)


def _impulses(t, rng, low, high):
    period = rng.uniform(low, high)
    offset = rng.uniform(0.0, period)
    width = 0.04
    distance = np.mod(t - offset, period)
    return rng.uniform(2.5, 3.5) * np.exp(-0.5 * (distance / width) ** 2)


def _random_walk(t, rng):
    steps = rng.normal(0.0, 0.15, size=t.shape[0])
    return np.cumsum(steps)


def class_signal(label: int, t: np.ndarray, rng) -> np.ndarray:
    """Señal limpia (3, n) de una clase; cada eje con sus propios parámetros."""
    family = label % len(SIGNAL_FAMILIES)
    band = label // len(SIGNAL_FAMILIES)
    axes = []
    for _ in range(3):
        if family == 0:
            axes.append(_sinusoid(t, rng, 0.5 + band, 1.0 + band))
        elif family == 1:
            axes.append(_sinusoid(t, rng, 2.0 + band, 3.0 + band))
        elif family == 2:
            axes.append(_sinusoid(t, rng, 5.0 + band, 7.0 + band))
        elif family == 3:
            axes.append(_impulses(t, rng, 0.8 + 0.5 * band, 1.2 + 0.5 * band))
        elif family == 4:
            axes.append(_impulses(t, rng, 0.2 + 0.1 * band, 0.3 + 0.1 * band))
        else:
            axes.append(_random_walk(t, rng) * (1.0 + band))
    return np.stack(axes)


def _window(signal: np.ndarray, timestamps: np.ndarray, label: int) -> SensorWindow:
    return SensorWindow(
        samples_x=signal[0],
        samples_y=signal[1],
        samples_z=signal[2],
        timestamps=timestamps,
        label=label,
    )


def generate_dataset(spec: SyntheticHarSpec = SyntheticHarSpec()) -> HarDataset:
    """
    Genera el dataset completo y lo divide 80/20 estratificado.

    Returns:
        HarDataset con las dos vistas de cada ejemplo

    Ejemplo:
        >>> ds = generate_dataset(SyntheticHarSpec(samples_per_class=10))
        >>> len(ds.train) + len(ds.test)
        60
    """
    rng = np.random.default_rng(spec.seed)
    timestamps = np.arange(spec.window_length, dtype=np.float64) / float(spec.sample_rate)

    teacher_windows = []
    student_windows = []
    labels = []
    for label in range(spec.classes):
        for _ in range(spec.samples_per_class):
            clean = class_signal(label, timestamps, rng)
            teacher_view = clean + float(spec.teacher_noise) * rng.standard_normal(clean.shape)
            student_view = clean + float(spec.student_noise) * rng.standard_normal(clean.shape)
            teacher_windows.append(_window(teacher_view, timestamps, label))
            student_windows.append(_window(student_view, timestamps, label))
            labels.append(label)

    labels = np.asarray(labels, dtype=np.int64)
    train_idx, test_idx = train_test_split(
        np.arange(labels.shape[0]),
        test_size=config.TEST_FRACTION,
        stratify=labels,
        random_state=int(spec.seed) % (2**32),
    )

    def subset(indices) -> HarSplit:
        indices = np.asarray(indices)
        return HarSplit(
            teacher_windows=[teacher_windows[i] for i in indices],
            student_windows=[student_windows[i] for i in indices],
            labels=labels[indices],
        )

    return HarDataset(train=subset(train_idx), test=subset(test_idx), spec=spec)


def encode_split(split: HarSplit, side: int = config.DEFAULT_SIDE) -> EncodedSplit:
    return EncodedSplit(
        teacher_images=encode_windows(split.teacher_windows, side),
        student_images=encode_windows(split.student_windows, side),
        labels=np.asarray(split.labels, dtype=np.int64),
    )


def encode_dataset(dataset: HarDataset, side: int = config.DEFAULT_SIDE) -> EncodedDataset:
    """Codifica ambas vistas de train y test como imágenes GAF aplanadas."""
    return EncodedDataset(
        train=encode_split(dataset.train, side),
        test=encode_split(dataset.test, side),
        side=int(side),
    )
