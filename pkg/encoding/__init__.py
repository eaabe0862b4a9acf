"""
Codificación de señales de acelerómetro como imágenes GAF.

Estructura:
    gaf.py: SensorWindow, PolarSeries, GafImage y el pipeline
            paa_downsample → min_max_normalize → polar_encode → gasf_matrix
    ingest.py: lectura del CSV de sensor y segmentación en ventanas
    raster.py: cuantización a 8 bits, PNG y formato raw float64

Todas las funciones son puras sobre entradas inmutables.
"""
