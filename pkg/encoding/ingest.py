"""
Ingesta de CSV de acelerómetro y segmentación en ventanas.

Esquema de entrada (encabezado obligatorio):
    timestamp,ax,ay,az,label

- timestamp: segundos (real)
- ax, ay, az: aceleración (real)
- label: entero ≥ 0
- separador ',' y decimal '.', sin variantes de locale

Las ventanas son segmentos consecutivos sin solapamiento de
window_length filas; la ventana parcial final se descarta.
"""

from pathlib import Path

import numpy as np
import pandas as pd
from pandas.errors import EmptyDataError, ParserError

import config
from encoding.gaf import SensorWindow
from errors import InvalidInputError


def read_sensor_csv(path) -> pd.DataFrame:
    """
    Lee y valida un CSV de sensor.

    Returns:
        DataFrame con columnas timestamp, ax, ay, az (float64) y label (int64)

    Raises:
        InvalidInputError: Archivo vacío, encabezado distinto o fila mal formada
                           (el mensaje incluye el número de línea del archivo)
    """
    path = Path(path)
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True, encoding="utf-8")
    except EmptyDataError as e:
        raise InvalidInputError(f"CSV vacío: {path}") from e
    except ParserError as e:
        raise InvalidInputError(f"CSV mal formado ({path}): {e}") from e
    except UnicodeDecodeError as e:
        raise InvalidInputError(f"CSV con bytes que no son UTF-8 ({path}, byte {e.start})") from e
    except ValueError as e:
        raise InvalidInputError(f"CSV ilegible ({path}): {e}") from e
    except FileNotFoundError as e:
        raise InvalidInputError(f"No existe el CSV: {path}") from e
    except OSError as e:
        raise InvalidInputError(f"No se pudo leer el CSV {path}: {e}") from e

    if list(df.columns) != config.CSV_COLUMNS:
        raise InvalidInputError(
            f"Encabezado inválido en {path}: {list(df.columns)}; "
            f"se esperaba {','.join(config.CSV_COLUMNS)}"
        )
    if df.empty:
        raise InvalidInputError(f"CSV sin filas de datos: {path}")

    parsed = pd.DataFrame(index=df.index)
    for column in config.CSV_COLUMNS:
        numeric = pd.to_numeric(df[column], errors="coerce")
        bad = numeric.isna() | ~np.isfinite(numeric.to_numpy(dtype=np.float64))
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            # +2: línea 1 es el encabezado y el índice arranca en 0
            raise InvalidInputError(
                f"Fila mal formada en línea {row + 2} de {path}: "
                f"{column}={df[column].iloc[row]!r}"
            )
        # float() redondea correctamente: un CSV escrito con %.17g vuelve exacto
        parsed[column] = df[column].map(float)

    labels = parsed["label"].to_numpy()
    invalid = (labels < 0) | (labels != np.floor(labels))
    if invalid.any():
        row = int(np.flatnonzero(invalid)[0])
        raise InvalidInputError(
            f"Label inválido en línea {row + 2} de {path}: {df['label'].iloc[row]!r}"
        )
    parsed["label"] = labels.astype(np.int64)
    return parsed


def window_label(labels: np.ndarray) -> int:
    """Label más frecuente de la ventana (empates → el menor)."""
    values, counts = np.unique(labels, return_counts=True)
    return int(values[np.argmax(counts)])


def segment_windows(df: pd.DataFrame, window_length: int = config.WINDOW_LENGTH) -> list:
    """
    Corta el DataFrame en ventanas consecutivas de window_length filas.

    Raises:
        InvalidInputError: Si window_length < 2 o los timestamps de alguna
                           ventana no son estrictamente crecientes
    """
    window_length = int(window_length)
    if window_length < 2:
        raise InvalidInputError(f"window_length debe ser ≥ 2 (recibido {window_length})")

    windows = []
    n_windows = len(df) // window_length
    for index in range(n_windows):
        chunk = df.iloc[index * window_length : (index + 1) * window_length]
        timestamps = chunk["timestamp"].to_numpy(dtype=np.float64)
        if np.any(np.diff(timestamps) <= 0):
            raise InvalidInputError(
                f"Ventana {index}: timestamps no monótonos "
                f"(filas {index * window_length + 2}–{(index + 1) * window_length + 1})"
            )
        windows.append(
            SensorWindow(
                samples_x=chunk["ax"].to_numpy(dtype=np.float64),
                samples_y=chunk["ay"].to_numpy(dtype=np.float64),
                samples_z=chunk["az"].to_numpy(dtype=np.float64),
                timestamps=timestamps,
                label=window_label(chunk["label"].to_numpy()),
            )
        )
    return windows


def load_windows(path, window_length: int = config.WINDOW_LENGTH) -> list:
    """Lee un CSV y lo devuelve segmentado; error si no alcanza una ventana."""
    df = read_sensor_csv(path)
    windows = segment_windows(df, window_length)
    if not windows:
        raise InvalidInputError(
            f"{path}: {len(df)} filas no alcanzan una ventana de {window_length}"
        )
    return windows


def windows_to_frame(windows) -> pd.DataFrame:
    """Inversa de segment_windows: concatena ventanas en el esquema CSV."""
    frames = [
        pd.DataFrame(
            {
                "timestamp": w.timestamps,
                "ax": w.samples_x,
                "ay": w.samples_y,
                "az": w.samples_z,
                "label": np.full(w.length, w.label, dtype=np.int64),
            }
        )
        for w in windows
    ]
    return pd.concat(frames, ignore_index=True)
