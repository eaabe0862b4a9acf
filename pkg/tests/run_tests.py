"""
Runner principal de tests.

Ejecuta todos los tests en orden lógico y reporta resultados consolidados.
También se pueden correr con pytest: `pytest tests/`.
"""

import os
import sys

# Agregar tests al path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from test_syntax import check_syntax
from test_config import run_all_tests as test_config
from test_model_interface import run_all_tests as test_interface
from test_gaf import run_all_tests as test_encoding
from test_autodiff import run_all_tests as test_autodiff
from test_losses import run_all_tests as test_losses
from test_checkpoint import run_all_tests as test_checkpoint
from test_training import run_all_tests as test_training
from test_cli import run_all_tests as test_cli
from test_acceptance import run_all_tests as test_acceptance

PHASES = [
    ("config", "⚙️  FASE 2: CONFIGURACIÓN Y VARIANTES", test_config),
    ("interface", "🔌 FASE 3: INTERFAZ DE REDES", test_interface),
    ("encoding", "🖼️  FASE 4: CODIFICACIÓN GAF E INGESTA", test_encoding),
    ("autodiff", "🧮 FASE 5: DIFERENCIACIÓN AUTOMÁTICA", test_autodiff),
    ("losses", "🎯 FASE 6: PÉRDIDAS DASK", test_losses),
    ("checkpoint", "💾 FASE 7: CHECKPOINTS", test_checkpoint),
    ("training", "🚀 FASE 8: ENTRENAMIENTO Y ABLACIÓN", test_training),
    ("cli", "🖥️  FASE 9: CLI END-TO-END", test_cli),
    ("acceptance", "🏁 FASE 10: ACEPTACIÓN (VSKD_SLOW_TESTS=1)", test_acceptance),
]


def main():
    """
    Ejecuta suite completa de tests.

    Orden de ejecución:
    1. Sintaxis (si falla aquí, no tiene sentido continuar)
    2-7. Piezas de abajo hacia arriba (config → redes → GAF → cinta → pérdidas → checkpoints)
    8-9. Entrenamiento y CLI (los más lentos)
    10. Aceptación con los defaults (solo con VSKD_SLOW_TESTS=1)
    """
    print("=" * 70)
    print("🚀 INICIANDO SUITE DE TESTS")
    print("=" * 70)

    results = {}

    # Test 1: Sintaxis
    print("\n" + "=" * 70)
    print("📝 FASE 1: VALIDACIÓN DE SINTAXIS")
    print("=" * 70)
    success, errors = check_syntax()
    results["syntax"] = success

    if not success:
        print("\n⚠️  Errores de sintaxis detectados. Corregir antes de continuar.")
        print_summary(results)
        return False

    for name, title, run in PHASES:
        print("\n" + "=" * 70)
        print(title)
        print("=" * 70)
        results[name] = run()

    # Resumen final
    print_summary(results)

    return all(results.values())


def print_summary(results):
    """Imprime resumen de resultados de tests."""
    print("\n" + "=" * 70)
    print("📊 RESUMEN DE TESTS")
    print("=" * 70)

    for test_name, passed in results.items():
        status = "✅ PASS" if passed else "❌ FAIL"
        print(f"   {status}  {test_name.capitalize()}")

    print("=" * 70)

    if all(results.values()):
        print("✅ TODOS LOS TESTS PASARON - Pipeline listo para entrenar")
    else:
        print("❌ HAY TESTS FALLANDO - Corregir antes de entrenar")

    print("=" * 70)


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
