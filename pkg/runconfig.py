"""
Configuración de una corrida del CLI (RunConfig).

Precedencia (de menor a mayor):
    1. defaults de config.py
    2. variables de entorno VSKD_<CAMPO> (ya aplicadas en config.py)
    3. archivo --config (texto plano `clave = valor`, '#' comentarios)
    4. flags del CLI

El archivo se parsea con dotenv_values (python-dotenv). Cada corrida
escribe un config.echo con TODOS los campos; pasarlo como --config
reproduce la corrida bit a bit.

Ejemplo de archivo:
    # corrida corta
    epochs = 5
    samples_per_class = 40
    teacher_hidden = 128,32
"""

from dataclasses import dataclass, fields, replace
from pathlib import Path

from dotenv import dotenv_values

import config
from errors import InvalidInputError
from losses.dask import DaskConfig
from training.dataset import SyntheticHarSpec
from training.trainer import TrainConfig

# Secciones del echo: orden de escritura de los campos
SECTIONS = {
    "run": ["seed", "out", "verbose"],
    "encoding": ["side", "window_length"],
    "dataset": ["classes", "samples_per_class", "sample_rate", "teacher_noise", "student_noise"],
    "train": [
        "rate",
        "student_rate",
        "momentum",
        "epochs",
        "batch_size",
        "teacher_hidden",
        "student_hidden",
        "teacher_dropout",
        "grad_clip",
    ],
    "dask": [
        "alpha",
        "beta",
        "gamma",
        "temperature",
        "huber_delta",
        "pair_limit",
        "triplet_limit",
        "distance_enabled",
        "angle_enabled",
    ],
}

# Entradas propias de cada subcomando (sección [command] del echo)
COMMAND_INPUTS = {
    "encode": ["input", "format"],
    "train-teacher": [],
    "distill": ["teacher"],
    "eval": ["checkpoint", "data"],
    "ablate": ["seeds", "with_st"],
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class RunConfig:
    """
    Unión plana de flags globales, parámetros de dataset, entrenamiento y
    pérdida, y las entradas del subcomando (CSV, checkpoints, semillas).
    """

    seed: int = config.SEED
    out: str = config.RUNS_DIR
    verbose: bool = True

    side: int = config.DEFAULT_SIDE
    window_length: int = config.WINDOW_LENGTH

    classes: int = config.CLASSES
    samples_per_class: int = config.SAMPLES_PER_CLASS
    sample_rate: float = config.SAMPLE_RATE_HZ
    teacher_noise: float = config.TEACHER_NOISE
    student_noise: float = config.STUDENT_NOISE

    rate: float = config.LEARNING_RATE
    student_rate: float = config.STUDENT_LEARNING_RATE
    momentum: float = config.MOMENTUM
    epochs: int = config.EPOCHS
    batch_size: int = config.BATCH_SIZE
    teacher_hidden: tuple = config.TEACHER_HIDDEN
    student_hidden: tuple = config.STUDENT_HIDDEN
    teacher_dropout: float = config.TEACHER_DROPOUT
    grad_clip: float = config.GRAD_CLIP

    alpha: float = config.ALPHA
    beta: float = config.BETA
    gamma: float = config.GAMMA
    temperature: float = config.TEMPERATURE
    huber_delta: float = config.HUBER_DELTA
    pair_limit: int = config.PAIR_LIMIT
    triplet_limit: int = config.TRIPLET_LIMIT
    distance_enabled: bool = True
    angle_enabled: bool = True

    # "" = no indicado
    command: str = ""
    input: str = ""
    format: str = config.IMAGE_FORMATS[0]
    teacher: str = ""
    checkpoint: str = ""
    data: str = ""
    seeds: int = 1
    with_st: bool = False

    # --- Vistas tipadas ---

    def dataset_spec(self) -> SyntheticHarSpec:
        return SyntheticHarSpec(
            classes=self.classes,
            window_length=self.window_length,
            samples_per_class=self.samples_per_class,
            sample_rate=self.sample_rate,
            teacher_noise=self.teacher_noise,
            student_noise=self.student_noise,
            seed=self.seed,
        )

    def dask_config(self) -> DaskConfig:
        return DaskConfig(
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            temperature=self.temperature,
            huber_delta=self.huber_delta,
            pair_limit=self.pair_limit,
            triplet_limit=self.triplet_limit,
            distance_enabled=self.distance_enabled,
            angle_enabled=self.angle_enabled,
        )

    def train_config(self, checkpoint_path=None) -> TrainConfig:
        return TrainConfig(
            rate=self.rate,
            student_rate=self.student_rate,
            momentum=self.momentum,
            epochs=self.epochs,
            batch_size=self.batch_size,
            dask=self.dask_config(),
            seed=self.seed,
            checkpoint_path=None if checkpoint_path is None else str(checkpoint_path),
            teacher_hidden=self.teacher_hidden,
            student_hidden=self.student_hidden,
            teacher_dropout=self.teacher_dropout,
            grad_clip=self.grad_clip,
        )

    def validate(self) -> "RunConfig":
        """Construye las vistas tipadas para que fallen temprano (exit 2)."""
        if int(self.side) < 2:
            raise InvalidInputError(f"side debe ser ≥ 2 (recibido {self.side})")
        if int(self.side) > int(self.window_length):
            raise InvalidInputError(
                f"side ({self.side}) no puede superar window_length ({self.window_length})"
            )
        if self.command and self.command not in COMMAND_INPUTS:
            raise InvalidInputError(
                f"command desconocido: {self.command!r}; disponibles: {', '.join(COMMAND_INPUTS)}"
            )
        if self.format not in config.IMAGE_FORMATS:
            raise InvalidInputError(
                f"format debe ser uno de {config.IMAGE_FORMATS} (recibido {self.format!r})"
            )
        if int(self.seeds) < 1:
            raise InvalidInputError(f"seeds debe ser ≥ 1 (recibido {self.seeds})")
        self.dataset_spec()
        self.train_config()
        return self


FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    kind = FIELD_TYPES[key]
    text = raw.strip()
    try:
        if kind in (int, "int"):
            return int(text)
        if kind in (float, "float"):
            return float(text)
        if kind in (bool, "bool"):
            lowered = text.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(text)
        if kind in (tuple, "tuple"):
            return tuple(int(part) for part in text.split(","))
    except ValueError as e:
        raise InvalidInputError(f"Valor inválido para '{key}': {raw!r}") from e
    return text


def parse_config_file(path) -> dict:
    """
    Lee un archivo `clave = valor` y devuelve los campos tipados.

    Raises:
        InvalidInputError: Archivo inexistente, clave desconocida o valor inválido
    """
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"No existe el archivo de configuración: {path}")

    values = {}
    for key, raw in dotenv_values(path, encoding="utf-8").items():
        if key not in FIELD_TYPES:
            available = ", ".join(FIELD_TYPES)
            raise InvalidInputError(
                f"Clave '{key}' desconocida en {path}.\nClaves válidas: {available}"
            )
        if raw is None:
            raise InvalidInputError(f"Clave '{key}' sin valor en {path}")
        values[key] = _coerce(key, raw)
    return values


def load_run_config(path=None, overrides: dict | None = None) -> RunConfig:
    """
    Arma el RunConfig de una corrida aplicando archivo y flags sobre los defaults.

    Args:
        path: archivo --config (opcional)
        overrides: flags del CLI; los valores None se ignoran
    """
    run_config = RunConfig()
    if path is not None:
        run_config = replace(run_config, **parse_config_file(path))
    if overrides:
        unknown = sorted(set(overrides) - set(FIELD_TYPES))
        if unknown:
            raise InvalidInputError(f"Campos desconocidos: {unknown}")
        run_config = replace(run_config, **{k: v for k, v in overrides.items() if v is not None})
    return run_config.validate()


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        # repr es exacto ida y vuelta
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def write_config_echo(run_config: RunConfig, path) -> Path:
    """
    Escribe todos los campos por sección; es un --config válido.

    La sección [command] guarda el subcomando y sus entradas indicadas
    (las vacías se omiten), así el echo solo alcanza para repetir la corrida.
    """
    path = Path(path)
    lines = ["# VSKD config echo: pasar como --config para reproducir la corrida"]
    for section, keys in SECTIONS.items():
        lines.append("")
        lines.append(f"# [{section}]")
        lines.extend(f"{key} = {_format(getattr(run_config, key))}" for key in keys)

    inputs = COMMAND_INPUTS.get(run_config.command)
    if inputs is not None:
        lines.append("")
        lines.append("# [command]")
        lines.append(f"command = {run_config.command}")
        lines.extend(
            f"{key} = {_format(getattr(run_config, key))}"
            for key in inputs
            if getattr(run_config, key) != ""
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
