"""
Configuración centralizada para el pipeline VSKD (conocimiento visión → sensor).

ARQUITECTURA:
- encoding/: ventanas de acelerómetro → imágenes GAF (GASF, 3 canales)
- autodiff/: tensores densos + cinta de diferenciación reversa
- losses/: términos DASK (CE, KL con temperatura, distancia, ángulo, semántico)
- models/: redes teacher/student intercambiables vía BaseNet
- training/: dataset sintético, entrenamiento, evaluación, ablación, checkpoints

Todos los valores por defecto pueden sobreescribirse con variables de entorno
VSKD_<CAMPO> (o un archivo .env local) y luego con un archivo de configuración
plano `clave = valor` (ver runconfig.py).

USO DE LAS FUNCIONES HELPER:
    # Obtener los switches de una variante de ablación
    variant = get_variant_config('ask')
    variant['distance']  # False

    # Saber si la variante quita exactamente un término
    if is_single_removal('dak'):
        pass
"""

import os
from dotenv import load_dotenv

# Carga las variables del archivo .env sin pisar las ya exportadas
load_dotenv(override=False)

# --- Codificación de señales ---
DEFAULT_SIDE = int(os.getenv("VSKD_SIDE") or 32)
WINDOW_LENGTH = int(os.getenv("VSKD_WINDOW_LENGTH") or 128)
ARCCOS_TOLERANCE = 1e-12
CSV_COLUMNS = ["timestamp", "ax", "ay", "az", "label"]

# --- Dataset sintético ---
CLASSES = int(os.getenv("VSKD_CLASSES") or 6)
SAMPLES_PER_CLASS = int(os.getenv("VSKD_SAMPLES_PER_CLASS") or 200)
SAMPLE_RATE_HZ = float(os.getenv("VSKD_SAMPLE_RATE_HZ") or 50.0)
TEACHER_NOISE = float(os.getenv("VSKD_TEACHER_NOISE") or 0.1)
STUDENT_NOISE = float(os.getenv("VSKD_STUDENT_NOISE") or 0.8)
TEST_FRACTION = 0.2

# --- Pérdida DASK ---
ALPHA = float(os.getenv("VSKD_ALPHA") or 1.0)
BETA = float(os.getenv("VSKD_BETA") or 1.0)
GAMMA = float(os.getenv("VSKD_GAMMA") or 1.0)
TEMPERATURE = float(os.getenv("VSKD_TEMPERATURE") or 4.0)
HUBER_DELTA = float(os.getenv("VSKD_HUBER_DELTA") or 1.0)
PAIR_LIMIT = int(os.getenv("VSKD_PAIR_LIMIT") or 256)
TRIPLET_LIMIT = int(os.getenv("VSKD_TRIPLET_LIMIT") or 256)

# --- Entrenamiento ---
SEED = int(os.getenv("VSKD_SEED") or 0)
LEARNING_RATE = float(os.getenv("VSKD_RATE") or 0.05)
# Paso del student (baseline y destilación); VSKD_RATE queda para el teacher
STUDENT_LEARNING_RATE = float(os.getenv("VSKD_STUDENT_RATE") or 0.005)
MOMENTUM = float(os.getenv("VSKD_MOMENTUM") or 0.9)
EPOCHS = int(os.getenv("VSKD_EPOCHS") or 30)
BATCH_SIZE = int(os.getenv("VSKD_BATCH_SIZE") or 16)
GRAD_CLIP = float(os.getenv("VSKD_GRAD_CLIP") or 5.0)
TEACHER_HIDDEN = (256, 64)
STUDENT_HIDDEN = (64, 32)
TEACHER_DROPOUT = float(os.getenv("VSKD_TEACHER_DROPOUT") or 0.0)
MIN_RELATION_BATCH = 4  # pares y tripletas necesitan al menos 4 ejemplos por lote

# Tipos de red (prefijo de parámetros en checkpoints → models.<tipo>.<Tipo>Net)
NET_KINDS = ["teacher", "student"]

# --- Verificación de gradientes ---
GRADCHECK_STEP = 1e-4
GRADCHECK_THRESHOLD = 1e-4
GRADCHECK_SEEDS = int(os.getenv("VSKD_GRADCHECK_SEEDS") or 10)

# --- Artefactos ---
CHECKPOINT_MAGIC = b"VSKD"
CHECKPOINT_VERSION = 1
RUNS_DIR = os.getenv("VSKD_RUNS_DIR") or "runs"
CONFIG_ECHO_NAME = "config.echo"
METRICS_NAME = "metrics.jsonl"
MANIFEST_NAME = "manifest.csv"
# Formatos de encode (el primero es el default)
IMAGE_FORMATS = ["raw", "png"]

# --- Códigos de salida (contrato estable) ---
EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ARTIFACT = 3
EXIT_TRAINING = 4
EXIT_VERIFICATION = 5

# --- Variantes de ablación ---
# Cada variante define:
# - alpha / beta / gamma: None = usar el valor de la configuración base, 0.0 = apagado
# - distance / angle: si beta se aplica a L_D y/o L_A
# - removes: términos que la variante quita respecto de DASK completo
# - description: qué mide la variante

ABLATION_VARIANTS = {
    "dask": {
        "alpha": None,
        "beta": None,
        "gamma": None,
        "distance": True,
        "angle": True,
        "removes": [],
        "description": "DASK completo: CE + α·KL + β·(L_D + L_A) + γ·L_S",
    },
    "ask": {
        "alpha": None,
        "beta": None,
        "gamma": None,
        "distance": False,
        "angle": True,
        "removes": ["distance"],
        "description": "Sin término de distancia (β solo sobre L_A)",
    },
    "dsk": {
        "alpha": None,
        "beta": None,
        "gamma": None,
        "distance": True,
        "angle": False,
        "removes": ["angle"],
        "description": "Sin término angular (β solo sobre L_D)",
    },
    "sk": {
        "alpha": None,
        "beta": 0.0,
        "gamma": None,
        "distance": True,
        "angle": True,
        "removes": ["distance", "angle"],
        "description": "Sin términos relacionales (β = 0)",
    },
    "dak": {
        "alpha": None,
        "beta": None,
        "gamma": 0.0,
        "distance": True,
        "angle": True,
        "removes": ["semantic"],
        "description": "Sin término semántico (γ = 0)",
    },
    "baseline": {
        "alpha": 0.0,
        "beta": 0.0,
        "gamma": 0.0,
        "distance": True,
        "angle": True,
        "removes": ["soft", "distance", "angle", "semantic"],
        "description": "Student solo con cross-entropy",
    },
    "st": {
        "alpha": None,
        "beta": 0.0,
        "gamma": 0.0,
        "distance": True,
        "angle": True,
        "removes": ["distance", "angle", "semantic"],
        "description": "Solo soft targets con temperatura (KD clásico)",
    },
}

# --- Orden de ablación ---
# Las seis variantes obligatorias; 'st' solo corre con --with-st.
ABLATION_ORDER = ["dask", "ask", "dsk", "sk", "dak", "baseline"]
OPTIONAL_VARIANTS = ["st"]


# --- Funciones Helper ---


def get_variant_config(variant_name: str) -> dict:
    """
    Obtiene la configuración de una variante de ablación por nombre.

    Args:
        variant_name: Nombre corto de la variante (ej: 'ask')

    Returns:
        dict: Configuración con keys alpha, beta, gamma, distance, angle,
              removes, description

    Raises:
        KeyError: Si la variante no está configurada

    Ejemplo:
        >>> get_variant_config('sk')['beta']
        0.0
    """
    if variant_name not in ABLATION_VARIANTS:
        available = ", ".join(ABLATION_VARIANTS.keys())
        raise KeyError(
            f"Variante '{variant_name}' no está configurada.\n"
            f"Variantes disponibles: {available}"
        )
    return ABLATION_VARIANTS[variant_name]


def is_single_removal(variant_name: str) -> bool:
    """
    Verifica si una variante quita exactamente un término de DASK.

    'sk' quita distancia y ángulo a la vez, por lo que no cuenta.

    Ejemplo:
        >>> is_single_removal('ask')
        True
        >>> is_single_removal('sk')
        False
    """
    return len(get_variant_config(variant_name)["removes"]) == 1


def list_variants(include_optional: bool = False) -> list:
    """Variantes a correr, en orden de reporte."""
    variants = list(ABLATION_ORDER)
    if include_optional:
        variants.extend(OPTIONAL_VARIANTS)
    return variants
