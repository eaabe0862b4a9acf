r"""
CLI del pipeline VSKD (conocimiento visión → sensor).

Subcomandos:
    encode          CSV de acelerómetro → imágenes GAF (png o raw) + manifest
    train-teacher   entrena el teacher sobre el dataset sintético
    distill         destila un student contra un teacher guardado
    eval            evalúa un checkpoint (dataset sintético o --data CSV)
    ablate          tabla de variantes DASK (una o varias semillas)
    gradcheck       verifica todos los gradientes contra diferencias finitas

Cada subcomando (salvo gradcheck) escribe en un directorio de corrida
<out>/<subcomando>-<timestamp>/ con su config.echo. El echo incluye las
entradas del subcomando (CSV, --teacher, --checkpoint, --seeds...): pasarlo
como --config repite la corrida sin más flags.

Códigos de salida (contrato estable):
    0 éxito | 2 entrada inválida | 3 artefacto inválido |
    4 entrenamiento divergió | 5 verificación de gradientes falló

Uso:
    python vskd.py train-teacher --config corrida.cfg --seed 3
    python vskd.py distill --teacher runs/train-teacher-.../teacher.ckpt
    python vskd.py distill --config runs/distill-.../config.echo --out otra
    python vskd.py eval --checkpoint runs/distill-.../student.ckpt
    python vskd.py ablate --seeds 5
    python vskd.py gradcheck --seeds 10
"""

import argparse
import io
import json
import sys
from datetime import datetime
from pathlib import Path

import pandas as pd

# Asegurar que el directorio raíz esté en sys.path para imports dinámicos
project_root = Path(__file__).resolve().parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

import config
from encoding.gaf import encode_window, encode_windows
from encoding.ingest import load_windows
from encoding.raster import save_png, save_raw
from errors import ArtifactError, InvalidInputError, TrainingError, VerificationError, VskdError
from runconfig import load_run_config, write_config_echo
from training.ablation import directional_checks, run_ablation_seeds
from training.checkpoint import load_checkpoint
from training.dataset import encode_dataset, generate_dataset
from training.metrics import evaluate
from training.trainer import distill_student, train_teacher
from training.verify import assert_gradients, run_gradcheck

EXIT_CODES = [
    (InvalidInputError, config.EXIT_INPUT),
    (ArtifactError, config.EXIT_ARTIFACT),
    (TrainingError, config.EXIT_TRAINING),
    (VerificationError, config.EXIT_VERIFICATION),
]


def banner(title: str):
    print("=" * 70)
    print(title)
    print("=" * 70)


def make_run_dir(base, command: str) -> Path:
    """Crea <base>/<command>-<timestamp>/ (con sufijo si ya existe)."""
    stamp = datetime.now().strftime("%Y%m%d-%H%M%S-%f")
    run_dir = Path(base) / f"{command}-{stamp}"
    suffix = 1
    while run_dir.exists():
        run_dir = Path(base) / f"{command}-{stamp}-{suffix}"
        suffix += 1
    run_dir.mkdir(parents=True)
    return run_dir


def write_metrics(history: list, path) -> Path:
    """Un registro JSON por línea, en orden de época y split."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as f:
        for record in history:
            f.write(json.dumps(record) + "\n")
    return path


def _path_flag(value):
    return None if value is None else str(Path(value).resolve())


def _flags(args, **extra) -> dict:
    """Flags presentes del subcomando (los None no pisan el archivo)."""
    return {
        "seed": args.seed,
        "out": args.out,
        "verbose": args.verbose,
        "command": args.command,
        **extra,
    }


def run_config_from(args, **extra):
    return load_run_config(args.config, _flags(args, **extra))


def _required(rc, key: str, flag: str) -> str:
    value = getattr(rc, key)
    if not value:
        raise InvalidInputError(f"{rc.command}: falta {flag} (o la clave '{key}' en --config)")
    return value


def _print_final(label: str, record: dict):
    print(
        f"📊 {label}: accuracy={record['accuracy']:.4f} | F1 macro={record['f1']:.4f} "
        f"| loss={record['loss_total']:.4f}"
    )


def _load_synthetic(rc):
    if rc.verbose:
        print(f"⏳ Generando dataset sintético ({rc.classes} clases × {rc.samples_per_class}, seed {rc.seed})...")
    data = encode_dataset(generate_dataset(rc.dataset_spec()), rc.side)
    if rc.verbose:
        print(f"✅ Dataset: {len(data.train)} train / {len(data.test)} test, imágenes {rc.side}×{rc.side}×3")
    return data


# =========================================================================
# SUBCOMANDOS
# =========================================================================


def cmd_encode(args) -> int:
    rc = run_config_from(
        args,
        side=args.side,
        window_length=args.window_length,
        input=_path_flag(args.input),
        format=args.format,
    )
    windows = load_windows(_required(rc, "input", "el CSV de entrada"), rc.window_length)
    # Validar todo antes de escribir: un error no deja salidas parciales
    images = [encode_window(w, rc.side) for w in windows]

    run_dir = make_run_dir(rc.out, "encode")
    rows = []
    for index, image in enumerate(images):
        filename = f"window_{index:05d}.{rc.format}"
        if rc.format == "png":
            save_png(image, run_dir / filename)
        else:
            save_raw(image, run_dir / filename)
        rows.append({"index": index, "filename": filename, "label": image.label, "side": image.side})

    pd.DataFrame(rows, columns=["index", "filename", "label", "side"]).to_csv(
        run_dir / config.MANIFEST_NAME, header=False, index=False
    )
    write_config_echo(rc, run_dir / config.CONFIG_ECHO_NAME)
    print(f"✅ {len(images)} imágenes ({rc.format}) en {run_dir}")
    return config.EXIT_OK


def cmd_train_teacher(args) -> int:
    rc = run_config_from(args)
    run_dir = make_run_dir(rc.out, "train-teacher")
    write_config_echo(rc, run_dir / config.CONFIG_ECHO_NAME)

    data = _load_synthetic(rc)
    result = train_teacher(data, rc.train_config(run_dir / "teacher.ckpt"), verbose=rc.verbose)
    write_metrics(result.history, run_dir / config.METRICS_NAME)

    _print_final("Teacher (test)", result.final("test"))
    print(f"💾 Corrida: {run_dir}")
    return config.EXIT_OK


def cmd_distill(args) -> int:
    rc = run_config_from(args, teacher=_path_flag(args.teacher))
    teacher_path = _required(rc, "teacher", "--teacher")
    teacher = load_checkpoint(teacher_path)
    if teacher.kind != "teacher":
        raise ArtifactError(f"{teacher_path} contiene un {teacher.kind}, se esperaba un teacher")

    data = _load_synthetic(rc)
    if teacher.input_dim != data.input_dim:
        raise ArtifactError(
            f"El teacher espera entradas de {teacher.input_dim} valores; "
            f"side={rc.side} produce {data.input_dim}"
        )

    run_dir = make_run_dir(rc.out, "distill")
    write_config_echo(rc, run_dir / config.CONFIG_ECHO_NAME)
    result = distill_student(data, teacher, rc.train_config(run_dir / "student.ckpt"), verbose=rc.verbose)
    write_metrics(result.history, run_dir / config.METRICS_NAME)

    _print_final("Student (test)", result.final("test"))
    print(f"💾 Corrida: {run_dir}")
    return config.EXIT_OK


def cmd_eval(args) -> int:
    config_path = args.config
    if config_path is None and args.checkpoint is not None:
        echo = Path(args.checkpoint).parent / config.CONFIG_ECHO_NAME
        config_path = echo if echo.is_file() else None
    flags = _flags(args, checkpoint=_path_flag(args.checkpoint), data=_path_flag(args.data))
    rc = load_run_config(config_path, flags)
    checkpoint = _required(rc, "checkpoint", "--checkpoint")
    model = load_checkpoint(checkpoint)

    if rc.data:
        windows = load_windows(rc.data, rc.window_length)
        images = encode_windows(windows, rc.side)
        labels = [w.label for w in windows]
        source = rc.data
    else:
        data = _load_synthetic(rc)
        images = data.test.view(model.kind)
        labels = data.test.labels
        source = f"sintético (test, vista {model.kind})"

    if images.shape[1] != model.input_dim:
        raise InvalidInputError(
            f"El checkpoint espera {model.input_dim} valores por imagen; los datos tienen {images.shape[1]}"
        )

    result = evaluate(model, images, labels)
    run_dir = make_run_dir(rc.out, "eval")
    write_config_echo(rc, run_dir / config.CONFIG_ECHO_NAME)
    report = {
        "checkpoint": checkpoint,
        "kind": model.kind,
        "data": source,
        "size": result.size,
        "accuracy": result.accuracy,
        "f1": result.f1,
        "confusion": result.confusion.tolist(),
    }
    (run_dir / "eval.json").write_text(json.dumps(report, indent=2), encoding="utf-8")

    print(f"📊 {model.kind} sobre {source}: accuracy={result.accuracy:.4f} | F1 macro={result.f1:.4f}")
    print(f"💾 Corrida: {run_dir}")
    return config.EXIT_OK


def cmd_ablate(args) -> int:
    rc = run_config_from(args, seeds=args.seeds, with_st=args.with_st)
    run_dir = make_run_dir(rc.out, "ablate")
    write_config_echo(rc, run_dir / config.CONFIG_ECHO_NAME)

    seeds = [rc.seed + offset for offset in range(rc.seeds)]
    variants = config.list_variants(include_optional=rc.with_st)
    result = run_ablation_seeds(
        rc.dataset_spec(), rc.train_config(), rc.side, seeds, variants, verbose=rc.verbose
    )

    table = result.table()
    summary = result.summary()
    table.to_csv(run_dir / "ablation.csv", index=False)
    summary.to_csv(run_dir / "ablation_summary.csv", index=False)

    print()
    banner("📊 ABLACIÓN (media sobre semillas)")
    print(summary.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
    for check in directional_checks(summary):
        status = "✅" if check["passed"] else "⚠️"
        print(f"{status} {check['check']}: {check['detail']}")
    print(f"💾 Corrida: {run_dir}")
    return config.EXIT_OK


def cmd_gradcheck(args) -> int:
    seed = config.SEED if args.seed is None else args.seed
    report = run_gradcheck(seeds=args.seeds, base_seed=seed)

    width = max(len(name) for name in report)
    for name, error in report.items():
        status = "✅" if error < config.GRADCHECK_THRESHOLD else "❌"
        print(f"{status} {name:<{width}}  max rel error = {error:.3e}")

    assert_gradients(report)
    print(f"✅ Todos los gradientes por debajo de {config.GRADCHECK_THRESHOLD:g}")
    return config.EXIT_OK


# =========================================================================
# PARSER
# =========================================================================


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="semilla global (u64)")
    common.add_argument("--out", default=None, help=f"directorio base de corridas (default: {config.RUNS_DIR})")
    common.add_argument("--config", default=None, help="archivo clave = valor")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", dest="verbose", action="store_true", default=None)
    verbosity.add_argument("--quiet", dest="verbose", action="store_false")
    common.set_defaults(verbose=None)

    parser = argparse.ArgumentParser(
        prog="vskd",
        description="Destilación de conocimiento visión → sensor con imágenes GAF",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", parents=[common], help="CSV → imágenes GAF")
    p.add_argument("input", nargs="?", default=None, help="CSV con encabezado timestamp,ax,ay,az,label")
    p.add_argument("--side", type=int, default=None, help=f"lado de la imagen (default {config.DEFAULT_SIDE})")
    p.add_argument("--window-length", type=int, default=None, help=f"muestras por ventana (default {config.WINDOW_LENGTH})")
    p.add_argument("--format", choices=config.IMAGE_FORMATS, default=None, help=f"default {config.IMAGE_FORMATS[0]}")
    p.set_defaults(handler=cmd_encode)

    p = sub.add_parser("train-teacher", parents=[common], help="entrena el teacher")
    p.set_defaults(handler=cmd_train_teacher)

    p = sub.add_parser("distill", parents=[common], help="destila el student con DASK")
    p.add_argument("--teacher", default=None, help="checkpoint del teacher")
    p.set_defaults(handler=cmd_distill)

    p = sub.add_parser("eval", parents=[common], help="evalúa un checkpoint")
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--data", default=None, help="CSV a evaluar (default: split de test sintético)")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("ablate", parents=[common], help="tabla de ablación de DASK")
    p.add_argument("--seeds", type=int, default=None, help="cantidad de semillas consecutivas (default 1)")
    p.add_argument("--with-st", action="store_true", default=None, help="agrega la variante solo-soft-targets")
    p.set_defaults(handler=cmd_ablate)

    p = sub.add_parser("gradcheck", parents=[common], help="verifica gradientes")
    p.add_argument("--seeds", type=int, default=config.GRADCHECK_SEEDS)
    p.set_defaults(handler=cmd_gradcheck)

    return parser


def main(argv=None) -> int:
    """
    Punto de entrada: parsea, ejecuta el subcomando y traduce errores.

    Returns:
        int: código de salida (0, 2, 3, 4 o 5)
    """
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except VskdError as e:
        for error_type, code in EXIT_CODES:
            if isinstance(e, error_type):
                print(f"❌ {e}", file=sys.stderr)
                return code
        print(f"❌ Error inesperado: {e}", file=sys.stderr)
        return config.EXIT_INPUT


if __name__ == "__main__":
    # Forzar UTF-8 en stdout/stderr para emojis en Windows
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf-8")
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding="utf-8")
    sys.exit(main())
