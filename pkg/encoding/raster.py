"""
Rasters de 8 bits y archivos de imagen GAF.

- quantize_image: [-1, 1] → [0, 255], redondeo half-away-from-zero,
  canal x→R, y→G, z→B
- PNG vía Pillow (formato de visualización)
- raw: float64 completo, mismo layout que los tensores de checkpoint
"""

from pathlib import Path

import numpy as np
from PIL import Image

from encoding.gaf import GafImage
from training.checkpoint import read_tensors, write_tensors
from errors import ArtifactError

RAW_TENSOR_NAME = "gaf"


def quantize_image(image: GafImage) -> np.ndarray:
    """
    Raster RGB uint8 (n, n, 3) de una imagen GAF.

    Ejemplo:
        -1 → 0, 0 → 128 (127.5 redondea hacia arriba), 1 → 255
    """
    scaled = (np.clip(image.to_hwc(), -1.0, 1.0) + 1.0) * 127.5
    # Todos los valores son ≥ 0: half-away-from-zero == floor(x + 0.5)
    return np.clip(np.floor(scaled + 0.5), 0, 255).astype(np.uint8)


def dequantize_image(raster: np.ndarray, label: int = 0) -> GafImage:
    """Inversa de quantize_image; error absoluto máximo 1/255."""
    values = np.asarray(raster, dtype=np.float64) / 127.5 - 1.0
    return GafImage(channels=np.transpose(values, (2, 0, 1)).copy(), label=int(label))


def save_png(image: GafImage, path) -> Path:
    path = Path(path)
    Image.fromarray(quantize_image(image)).save(path, format="PNG")
    return path


def load_png(path, label: int = 0) -> GafImage:
    try:
        with Image.open(path) as img:
            raster = np.asarray(img.convert("RGB"))
    except OSError as e:
        raise ArtifactError(f"No se pudo leer PNG '{path}': {e}") from e
    return dequantize_image(raster, label)


def save_raw(image: GafImage, path) -> Path:
    """Guarda los valores float64 exactos (layout n×n×3)."""
    return write_tensors(path, {RAW_TENSOR_NAME: image.to_hwc()})


def load_raw_image(path, label: int = 0) -> GafImage:
    tensors = read_tensors(path)
    if RAW_TENSOR_NAME not in tensors:
        raise ArtifactError(f"'{path}' no contiene el tensor '{RAW_TENSOR_NAME}'")
    hwc = tensors[RAW_TENSOR_NAME]
    if hwc.ndim != 3 or hwc.shape[2] != 3:
        raise ArtifactError(f"Shape inválido para imagen raw: {hwc.shape}")
    return GafImage(channels=np.transpose(hwc, (2, 0, 1)).copy(), label=int(label))
