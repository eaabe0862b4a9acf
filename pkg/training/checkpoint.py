"""
Checkpoints binarios de parámetros.

Formato (todo little-endian):

    magic      4 bytes  b"VSKD"
    version    u32
    por tensor:
        name_len   u32
        name       name_len bytes UTF-8
        rank       u32
        dims       rank × u64
        values     prod(dims) × f64

El mismo layout se usa para imágenes GAF en formato raw (un único tensor
llamado 'gaf'). Los nombres de parámetros llevan el tipo de red como
prefijo ('teacher.w1', 'student.proj'), lo que permite reconstruir la red
solo a partir del archivo.
"""

import struct
from pathlib import Path

import numpy as np

import config
from errors import ArtifactError

_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")


def write_tensors(path, tensors: dict) -> Path:
    """
    Escribe un diccionario nombre → array en el formato de checkpoint.

    El orden de escritura es el orden de inserción del diccionario, así
    dos llamadas con los mismos datos producen archivos idénticos.
    """
    path = Path(path)
    chunks = [config.CHECKPOINT_MAGIC, _U32.pack(config.CHECKPOINT_VERSION)]
    for name, array in tensors.items():
        values = np.ascontiguousarray(array, dtype="<f8")
        encoded = name.encode("utf-8")
        chunks.append(_U32.pack(len(encoded)))
        chunks.append(encoded)
        chunks.append(_U32.pack(values.ndim))
        chunks.extend(_U64.pack(dim) for dim in values.shape)
        chunks.append(values.tobytes(order="C"))

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"".join(chunks))
    return path


class _Reader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.offset = 0
        self.path = path

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise ArtifactError(
                f"Checkpoint truncado ({self.path}): faltan bytes leyendo {what} "
                f"en offset {self.offset}"
            )
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    @property
    def exhausted(self) -> bool:
        return self.offset >= len(self.data)


def read_tensors(path) -> dict:
    """
    Lee un archivo de checkpoint completo.

    Raises:
        ArtifactError: Archivo inexistente, magic incorrecto, versión no
                       soportada o contenido truncado
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ArtifactError(f"No se pudo leer checkpoint '{path}': {e}") from e

    reader = _Reader(data, path)
    magic = reader.take(len(config.CHECKPOINT_MAGIC), "magic")
    if magic != config.CHECKPOINT_MAGIC:
        raise ArtifactError(f"'{path}' no es un checkpoint VSKD (magic={magic!r})")
    (version,) = _U32.unpack(reader.take(4, "versión"))
    if version != config.CHECKPOINT_VERSION:
        raise ArtifactError(
            f"Versión de checkpoint {version} no soportada (se esperaba {config.CHECKPOINT_VERSION})"
        )

    tensors = {}
    while not reader.exhausted:
        (name_len,) = _U32.unpack(reader.take(4, "longitud de nombre"))
        try:
            name = reader.take(name_len, "nombre").decode("utf-8")
        except UnicodeDecodeError as e:
            raise ArtifactError(f"Nombre de tensor corrupto en '{path}'") from e
        (rank,) = _U32.unpack(reader.take(4, f"rank de '{name}'"))
        dims = tuple(_U64.unpack(reader.take(8, f"dims de '{name}'"))[0] for _ in range(rank))
        count = int(np.prod(dims, dtype=np.int64)) if dims else 1
        raw = reader.take(count * 8, f"valores de '{name}'")
        tensors[name] = np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(dims)

    return tensors


def save_checkpoint(model, path) -> Path:
    """Guarda los parámetros de una red con el prefijo de su tipo."""
    return write_tensors(path, model.state_dict())


def load_checkpoint(path):
    """
    Reconstruye la red guardada en un checkpoint.

    Returns:
        BaseNet: TeacherNet o StudentNet según el prefijo de los nombres

    Raises:
        ArtifactError: Checkpoint ilegible, sin parámetros, con prefijos
                       mezclados o shapes inconsistentes
    """
    from models import load_net_class

    tensors = read_tensors(path)
    if not tensors:
        raise ArtifactError(f"Checkpoint sin parámetros: {path}")

    kinds = {name.split(".", 1)[0] for name in tensors}
    if len(kinds) != 1:
        raise ArtifactError(f"Checkpoint con tipos de red mezclados: {sorted(kinds)}")
    kind = kinds.pop()

    try:
        net_class = load_net_class(kind)
    except (KeyError, ImportError) as e:
        raise ArtifactError(f"Tipo de red desconocido en checkpoint: '{kind}'") from e

    params = {name.split(".", 1)[1]: values for name, values in tensors.items()}
    return net_class.from_state(params)
