"""
Suite de tests del pipeline VSKD (GAF + destilación DASK).

Los tests usan datasets sintéticos chicos y corren en CPU en segundos:
- Sintaxis y configuración
- Interfaz de las redes y formato de checkpoints
- Codificación GAF, cinta de gradientes y pérdidas contra oráculos numpy
- Entrenamiento, ablación y CLI end-to-end
"""
