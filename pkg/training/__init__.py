"""
Protocolo de entrenamiento VSKD a escala de escritorio.

Estructura:
    dataset.py: generador sintético HAR con vistas teacher/student
    trainer.py: SGD con momentum, train_teacher, distill_student, baseline
    metrics.py: accuracy, F1 macro y matriz de confusión
    ablation.py: variantes de DASK con semillas compartidas
    checkpoint.py: formato binario de parámetros y tensores raw
    verify.py: suite de verificación de gradientes del CLI

Orden del protocolo:
    1. train_teacher con cross-entropy sobre la vista teacher
    2. distill_student con DASK contra el teacher congelado
"""
