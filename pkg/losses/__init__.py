"""
Términos de la pérdida DASK como operaciones diferenciables.

Estructura:
    dask.py: DaskConfig, DistillBatch, cross_entropy, soft_targets,
             kd_soft_loss, huber, semantic_loss, dask_total
    relational.py: potenciales de distancia y ángulo, L_D, L_A y el
                   muestreo de pares/tripletas
"""
