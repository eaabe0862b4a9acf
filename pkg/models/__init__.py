"""
Redes teacher y student.

Cada red implementa la interfaz BaseNet y se carga dinámicamente por
convención de nombres:

    teacher → models.teacher → TeacherNet
    student → models.student → StudentNet

Estructura:
    base.py: Clase abstracta BaseNet y NetOutput
    teacher.py: TeacherNet (256/64, dropout opcional)
    student.py: StudentNet (64/32 + proyección semántica)
"""

import importlib

import config


def load_net_class(kind: str):
    """
    Carga la clase de red correspondiente a un tipo.

    Args:
        kind: 'teacher' o 'student' (prefijo de los parámetros en checkpoints)

    Returns:
        type: Subclase de BaseNet

    Raises:
        KeyError: Si el tipo no está en config.NET_KINDS
        ImportError: Si el módulo o la clase no existen

    Example:
        >>> load_net_class('student').__name__
        'StudentNet'
    """
    if kind not in config.NET_KINDS:
        available = ", ".join(config.NET_KINDS)
        raise KeyError(f"Tipo de red '{kind}' no está configurado.\nTipos disponibles: {available}")

    class_name = kind.capitalize() + "Net"
    module = importlib.import_module(f"models.{kind}")
    try:
        return getattr(module, class_name)
    except AttributeError as e:
        raise ImportError(f"models.{kind} no define la clase {class_name}") from e
