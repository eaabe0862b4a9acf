"""
Ablación de los términos de DASK.

Variantes (config.ABLATION_VARIANTS, en el orden de config.ABLATION_ORDER):

    dask      CE + α·KL + β·(L_D + L_A) + γ·L_S
    ask       sin L_D
    dsk       sin L_A
    sk        β = 0
    dak       γ = 0
    baseline  α = β = γ = 0
    st        solo soft targets (opcional, --with-st)

Todas las variantes de una semilla comparten dataset, teacher y semilla de
entrenamiento; solo cambia la pérdida del student.
"""

from dataclasses import dataclass, field, replace

import pandas as pd

import config
from training.dataset import encode_dataset, generate_dataset
from training.trainer import distill_student, train_teacher

TABLE_COLUMNS = ["variant", "seed", "accuracy", "f1", "removes", "description"]

# Umbrales de los chequeos direccionales (puntos de accuracy)
SINGLE_REMOVAL_TOLERANCE = 0.5
BASELINE_MARGIN = 1.0


@dataclass
class AblationResult:
    """
    Attributes:
        rows: una fila por (variante, semilla)
        runs: (variante, semilla) → TrainingResult
        teachers: semilla → métricas finales del teacher
    """

    rows: list = field(default_factory=list)
    runs: dict = field(default_factory=dict)
    teachers: dict = field(default_factory=dict)

    def table(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=TABLE_COLUMNS)

    def summary(self) -> pd.DataFrame:
        """Media por variante, en orden de reporte."""
        table = self.table()
        order = [v for v in config.list_variants(include_optional=True) if v in set(table["variant"])]
        summary = table.groupby("variant")[["accuracy", "f1"]].mean().reindex(order)
        summary["runs"] = table.groupby("variant").size().reindex(order)
        return summary.reset_index()

    def seeds_by_variant(self) -> dict:
        table = self.table()
        return {v: sorted(group["seed"].tolist()) for v, group in table.groupby("variant")}


def run_ablation(data, teacher, base_cfg, variants=None, verbose: bool = False, result=None) -> AblationResult:
    """
    Destila un student por variante contra el mismo teacher.

    Args:
        data: EncodedDataset
        teacher: TeacherNet entrenado (no se modifica)
        base_cfg: TrainConfig base; cada variante reemplaza solo su DaskConfig
        variants: nombres a correr (default: las seis obligatorias)
        result: AblationResult a completar (para acumular semillas)

    Returns:
        AblationResult con una fila por variante
    """
    variants = config.list_variants() if variants is None else list(variants)
    result = AblationResult() if result is None else result

    for name in variants:
        variant = config.get_variant_config(name)
        cfg = replace(base_cfg, dask=base_cfg.dask.for_variant(name), checkpoint_path=None)
        if verbose:
            print(f"\n📊 Variante {name}: {variant['description']}")
        run = distill_student(data, teacher, cfg, verbose=verbose)
        final = run.final("test")
        result.runs[(name, cfg.seed)] = run
        result.rows.append(
            {
                "variant": name,
                "seed": cfg.seed,
                "accuracy": final["accuracy"],
                "f1": final["f1"],
                "removes": "+".join(variant["removes"]) or "-",
                "description": variant["description"],
            }
        )
    return result


def run_ablation_seeds(spec, base_cfg, side: int, seeds, variants=None, verbose: bool = False) -> AblationResult:
    """
    Ablación completa para varias semillas.

    Cada semilla genera su propio dataset y entrena su propio teacher; las
    variantes de una semilla comparten ambos.
    """
    result = AblationResult()
    for seed in seeds:
        seed = int(seed)
        if verbose:
            print(f"\n{'=' * 70}\n🎲 Semilla {seed}\n{'=' * 70}")
        data = encode_dataset(generate_dataset(replace(spec, seed=seed)), side)
        cfg = replace(base_cfg, seed=seed, checkpoint_path=None)
        teacher_run = train_teacher(data, cfg, verbose=verbose)
        result.teachers[seed] = teacher_run.final("test")
        run_ablation(data, teacher_run.model, cfg, variants, verbose, result)
    return result


def directional_checks(summary: pd.DataFrame) -> list:
    """
    Chequeos direccionales sobre las medias por variante.

    - DASK ≥ cada variante que quita un único término − 0.5 puntos
    - DASK − baseline ≥ 1.0 punto

    Returns:
        list[dict]: {check, passed, detail}; vacía si falta la fila dask
    """
    means = dict(zip(summary["variant"], summary["accuracy"]))
    if "dask" not in means:
        return []

    dask_points = 100.0 * means["dask"]
    checks = []
    for name, accuracy in means.items():
        if name == "dask" or not config.is_single_removal(name):
            continue
        points = 100.0 * accuracy
        checks.append(
            {
                "check": f"dask >= {name} - {SINGLE_REMOVAL_TOLERANCE}",
                "passed": dask_points >= points - SINGLE_REMOVAL_TOLERANCE,
                "detail": f"{dask_points:.2f} vs {points:.2f}",
            }
        )
    if "baseline" in means:
        gain = dask_points - 100.0 * means["baseline"]
        checks.append(
            {
                "check": f"dask - baseline >= {BASELINE_MARGIN}",
                "passed": gain >= BASELINE_MARGIN,
                "detail": f"ganancia {gain:+.2f} puntos",
            }
        )
    return checks
