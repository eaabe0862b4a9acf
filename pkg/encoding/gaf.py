"""
Codificación de ventanas de acelerómetro como imágenes GAF.

Cada eje de una ventana pasa por el mismo pipeline:

    paa_downsample → min_max_normalize → polar_encode → gasf_matrix

y los tres campos resultantes se apilan como canales (x, y, z) de una
imagen n×n×3. Toda la aritmética es float64; la cuantización a 8 bits
vive en encoding/raster.py y solo se usa en el borde del CLI.

DECISIONES DE DISEÑO:
- GASF (suma trigonométrica), no GADF.
- Series constantes se normalizan a ceros → θ = π/2 → canal todo −1.
- arccos recibe valores recortados a [-1, 1] con tolerancia 1e-12.
- PAA con semántica numpy.array_split: los primeros n mod m frames
  llevan una muestra extra, ningún frame queda vacío.
"""

from dataclasses import dataclass

import numpy as np

import config
from errors import InvalidInputError


@dataclass(frozen=True)
class SensorWindow:
    """
    Segmento de longitud fija de un acelerómetro triaxial.

    Attributes:
        samples_x, samples_y, samples_z: aceleración por eje (longitud n)
        timestamps: segundos, estrictamente crecientes (longitud n)
        label: índice de clase ≥ 0
    """

    samples_x: np.ndarray
    samples_y: np.ndarray
    samples_z: np.ndarray
    timestamps: np.ndarray
    label: int

    def __post_init__(self):
        arrays = {}
        for name in ("samples_x", "samples_y", "samples_z", "timestamps"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 1:
                raise InvalidInputError(f"{name} debe ser una secuencia 1-D")
            arrays[name] = arr
            object.__setattr__(self, name, arr)

        lengths = {name: arr.shape[0] for name, arr in arrays.items()}
        if len(set(lengths.values())) != 1:
            raise InvalidInputError(f"Longitudes distintas entre ejes: {lengths}")
        if self.length < 2:
            raise InvalidInputError(f"La ventana necesita n ≥ 2 muestras (n={self.length})")
        if np.any(np.diff(self.timestamps) <= 0):
            raise InvalidInputError("Los timestamps de la ventana no son estrictamente crecientes")
        if int(self.label) < 0:
            raise InvalidInputError(f"Label negativo: {self.label}")
        object.__setattr__(self, "label", int(self.label))

    @property
    def length(self) -> int:
        return int(self.timestamps.shape[0])

    def axes(self) -> tuple:
        """Ejes en el orden fijo de canales (x, y, z)."""
        return (self.samples_x, self.samples_y, self.samples_z)


@dataclass(frozen=True)
class PolarSeries:
    """θ_i = arccos(x̂_i) ∈ [0, π] y r_i = t_i."""

    theta: np.ndarray
    radius: np.ndarray


@dataclass(frozen=True)
class GafImage:
    """
    Imagen GASF de 3 canales.

    Attributes:
        channels: array (3, n, n) float64 en [-1, 1], canales (x, y, z)
        label: índice de clase copiado de la ventana
    """

    channels: np.ndarray
    label: int

    @property
    def side(self) -> int:
        return int(self.channels.shape[1])

    def to_hwc(self) -> np.ndarray:
        """Layout n×n×3 (alto, ancho, canal) usado por rasters y redes."""
        return np.transpose(self.channels, (1, 2, 0))

    def flatten(self) -> np.ndarray:
        """Vector de entrada de las redes: side²·3 valores en orden n×n×3."""
        return self.to_hwc().reshape(-1)


def min_max_normalize(series) -> np.ndarray:
    """
    Escala afín a [-1, 1]: x̂ = 2·(x − min)/(max − min) − 1.

    Una serie constante devuelve todo ceros.

    Raises:
        InvalidInputError: Si la serie está vacía
    """
    x = np.asarray(series, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise InvalidInputError("No se puede normalizar una serie vacía")

    lo = x.min()
    hi = x.max()
    if hi == lo:
        return np.zeros_like(x)

    out = 2.0 * (x - lo) / (hi - lo) - 1.0
    # Extremos exactos: min → −1, max → +1
    out[x == lo] = -1.0
    out[x == hi] = 1.0
    return np.clip(out, -1.0, 1.0)


def polar_encode(normalized, timestamps) -> PolarSeries:
    """
    Coordenadas polares de una serie normalizada.

    Raises:
        InvalidInputError: Si las longitudes difieren o algún valor cae fuera
                           de [-1 − 1e-12, 1 + 1e-12] (falta normalizar)
    """
    x = np.asarray(normalized, dtype=np.float64).reshape(-1)
    t = np.asarray(timestamps, dtype=np.float64).reshape(-1)
    if x.shape != t.shape:
        raise InvalidInputError(
            f"Serie y timestamps con longitudes distintas ({x.size} vs {t.size})"
        )

    tol = config.ARCCOS_TOLERANCE
    bad = np.flatnonzero((x < -1.0 - tol) | (x > 1.0 + tol))
    if bad.size:
        raise InvalidInputError(
            f"Valor {x[bad[0]]!r} en posición {bad[0]} fuera de [-1, 1]: ¿serie sin normalizar?"
        )

    theta = np.arccos(np.clip(x, -1.0, 1.0))
    return PolarSeries(theta=theta, radius=t.copy())


def gasf_matrix(theta) -> np.ndarray:
    """
    Campo angular de suma: G[i][j] = cos(θ_i + θ_j).

    Se evalúa sobre el triángulo superior y se espeja, así la simetría
    es exacta bit a bit.
    """
    th = np.asarray(theta, dtype=np.float64).reshape(-1)
    upper = np.triu(np.cos(th[:, None] + th[None, :]))
    return upper + np.triu(upper, k=1).T


def paa_downsample(series, target: int) -> np.ndarray:
    """
    Aproximación por agregados (PAA): media de cada frame contiguo.

    Raises:
        InvalidInputError: Si target < 1 o target > len(series)
    """
    x = np.asarray(series, dtype=np.float64).reshape(-1)
    target = int(target)
    if target < 1 or target > x.size:
        raise InvalidInputError(f"target={target} fuera de rango [1, {x.size}]")
    if target == x.size:
        return x.copy()
    return np.array([frame.mean() for frame in np.array_split(x, target)])


def encode_axis(series, timestamps, target_side: int) -> np.ndarray:
    """Pipeline completo de un eje: PAA → normalización → polar → GASF."""
    reduced = paa_downsample(series, target_side)
    reduced_t = paa_downsample(timestamps, target_side)
    polar = polar_encode(min_max_normalize(reduced), reduced_t)
    return gasf_matrix(polar.theta)


def encode_window(window: SensorWindow, target_side: int = config.DEFAULT_SIDE) -> GafImage:
    """
    Convierte una ventana en imagen GAF (canales x, y, z).

    Raises:
        InvalidInputError: Si target_side < 2 o excede la longitud de la ventana
    """
    if int(target_side) < 2:
        raise InvalidInputError(f"target_side debe ser ≥ 2 (recibido {target_side})")

    channels = np.stack(
        [encode_axis(axis, window.timestamps, target_side) for axis in window.axes()]
    )
    return GafImage(channels=channels, label=window.label)


def encode_windows(windows, target_side: int = config.DEFAULT_SIDE) -> np.ndarray:
    """Codifica una lista de ventanas como matriz (N, side²·3) para las redes."""
    if not windows:
        return np.zeros((0, int(target_side) ** 2 * 3))
    return np.stack([encode_window(w, target_side).flatten() for w in windows])
