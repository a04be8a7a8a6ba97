"""
Command-line front end.

Every command prints stable `key=value` summary lines on stdout; logs go to
the log file and stderr. Exit codes: 0 ok, 2 I/O, 3 validation, 4 non-finite
loss or state, 5 failed scenario, 1 unexpected.
"""
import argparse
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from jetaero import __version__
from jetaero.utils.error_messages import EXIT_OK, EXIT_SCENARIO_FAILED
from jetaero.utils.helpers import file_digest, format_float
from jetaero.utils.logger import get_logger

logger = get_logger(__name__)


def emit(**values) -> None:
    """One key=value summary line on stdout."""
    print(" ".join(f"{k}={format_float(v) if isinstance(v, float) else v}" for k, v in values.items()))


def _load_model(spec: str):
    from jetaero.model.loader import load_model_file, resolve_model_path
    return load_model_file(resolve_model_path(spec))


def _require_file(path: str) -> Path:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"No such file: '{path}'")
    return path


# --- generate-dataset ----------------------------------------------------

def cmd_generate_dataset(args: argparse.Namespace) -> int:
    from dataclasses import replace

    from jetaero.dataset.augment import mirror_augment
    from jetaero.dataset.oracle import default_oracle_config, load_oracle_config, oracle_generate
    from jetaero.dataset.storage import write_dataset

    model = _load_model(args.model)
    if args.config is not None:
        cfg = load_oracle_config(_require_file(args.config), seed=args.seed)
    else:
        cfg = default_oracle_config(seed=args.seed if args.seed is not None else 0)
    if args.interference is not None:
        cfg = replace(cfg, interference=args.interference)

    ds = oracle_generate(model, cfg)
    if args.augment:
        ds = mirror_augment(ds, model)
    write_dataset(ds, args.out)
    logger.info(f"Dataset written to {args.out}")
    emit(samples=len(ds), config_hash=ds.config_hash, seed=ds.seed, out=args.out)
    return EXIT_OK


# --- fit-axisym ----------------------------------------------------------

def _split(ds, args):
    from jetaero.dataset.augment import split
    from jetaero.dataset.storage import read_dataset

    if args.val_dataset is not None:
        return ds, read_dataset(_require_file(args.val_dataset))
    return split(ds, args.split, seed=args.seed)


def cmd_fit_axisym(args: argparse.Namespace) -> int:
    from jetaero.aero.axisym import predict_force_areas
    from jetaero.aero.coeffs_io import write_coeffs_file
    from jetaero.aero.metrics import rel_err
    from jetaero.aero.regression import fit_coefficients
    from jetaero.dataset.storage import read_dataset

    model = _load_model(args.model)
    ds = read_dataset(_require_file(args.dataset))
    train_ds, val_ds = _split(ds, args)
    coeffs, report = fit_coefficients(model, train_ds, lam=args.lam)
    write_coeffs_file(coeffs, args.out)

    train_err = rel_err(predict_force_areas(model, train_ds.joints, train_ds.directions, coeffs), train_ds.outputs)
    val_err = rel_err(predict_force_areas(model, val_ds.joints, val_ds.directions, coeffs), val_ds.outputs)
    emit(train_rel_err=train_err, val_rel_err=val_err, links=len(coeffs.link_names),
         positivity_corrected=len(report.positivity_corrected), out=args.out)
    return EXIT_OK


# --- train-mlp -----------------------------------------------------------

def cmd_train_mlp(args: argparse.Namespace) -> int:
    from jetaero.aero.metrics import rel_err
    from jetaero.aero.mlp import MlpArch, mlp_init
    from jetaero.aero.training import TrainConfig, predict_force_areas_mlp, train
    from jetaero.aero.weights_io import save_mlp
    from jetaero.dataset.storage import read_dataset

    ds = read_dataset(_require_file(args.dataset))
    train_ds, val_ds = _split(ds, args)
    arch = MlpArch(input_dim=3 + ds.n_joints, output_dim=3 * ds.n_links, n_hidden=args.hidden,
                   width=args.width, dropout=args.dropout)
    cfg = TrainConfig(epochs=args.epochs, batch_size=args.batch_size, learning_rate=args.lr, seed=args.seed)
    mlp, history = train(mlp_init(arch, args.seed), train_ds, val_ds, cfg)
    save_mlp(mlp, args.out)
    history_path = args.history if args.history is not None else str(Path(args.out).with_suffix(".history.csv"))
    history.write_csv(history_path)

    emit(initial_train_mse=history.initial_train_mse, initial_val_mse=history.initial_val_mse,
         train_mse=history.train_mse[-1], val_mse=history.val_mse[-1],
         train_rel_err=rel_err(predict_force_areas_mlp(mlp, train_ds), train_ds.outputs),
         val_rel_err=rel_err(predict_force_areas_mlp(mlp, val_ds), val_ds.outputs),
         epochs=len(history), out=args.out, history=history_path)
    return EXIT_OK


# --- eval-models ---------------------------------------------------------

def cmd_eval_models(args: argparse.Namespace) -> int:
    from jetaero.aero.axisym import predict_force_areas
    from jetaero.aero.coeffs_io import load_coeffs_file
    from jetaero.aero.metrics import rel_err
    from jetaero.aero.training import predict_force_areas_mlp
    from jetaero.aero.weights_io import load_mlp
    from jetaero.dataset.storage import read_dataset

    if args.coeffs is None and args.weights is None:
        raise ValueError("eval-models needs --coeffs and/or --weights")
    model = _load_model(args.model)
    ds = read_dataset(_require_file(args.dataset))
    predictions = {}
    if args.coeffs is not None:
        coeffs = load_coeffs_file(_require_file(args.coeffs))
        predictions["axisym"] = predict_force_areas(model, ds.joints, ds.directions, coeffs)
    if args.weights is not None:
        predictions["mlp"] = predict_force_areas_mlp(load_mlp(_require_file(args.weights)), ds)

    errors = {f"{name}_rel_err": rel_err(pred, ds.outputs) for name, pred in predictions.items()}
    if args.out is not None:
        lines = ["link," + ",".join(predictions)]
        for k, link in enumerate(ds.link_names):
            lines.append(link + "," + ",".join(
                format_float(rel_err(pred[:, k], ds.outputs[:, k])) for pred in predictions.values()))
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    emit(samples=len(ds), **errors)
    return EXIT_OK


# --- simulate ------------------------------------------------------------

def _scenarios(args: argparse.Namespace) -> List:
    from jetaero.sim.envelope import ablation_matrix, fictitious_wind
    from jetaero.sim.scenario import load_scenario

    scenarios = []
    for path in args.scenario:
        sc = load_scenario(_require_file(path), duration=args.duration, seed=args.seed)
        if args.matrix:
            scenarios.extend(ablation_matrix(sc))
        else:
            scenarios.append(sc)
        if args.fictitious:
            scenarios.append(fictitious_wind(sc))
    names = [sc.name for sc in scenarios]
    if len(set(names)) != len(names):
        raise ValueError("scenario names must be unique within one simulate call")
    return scenarios


def cmd_simulate(args: argparse.Namespace) -> int:
    from jetaero.config import OUTPUT_DIR
    from jetaero.sim.scenario import run_scenarios

    scenarios = _scenarios(args)
    if len(scenarios) > 1 and args.out_log is not None:
        raise ValueError("--out-log names one file; use --out-dir for several scenarios")
    logs = run_scenarios(scenarios, jobs=args.jobs)
    out_dir = Path(args.out_dir if args.out_dir is not None else OUTPUT_DIR)
    all_completed = True
    for sc, log in zip(scenarios, logs):
        if args.out_log is not None:
            path = log.write(args.out_log)
        else:
            path = log.write(out_dir / f"{sc.name}.csv")
        all_completed &= log.completed
        emit(scenario=sc.name, status=log.verdict, plant=log.meta["plant"], controller=log.meta["controller"],
             max_com_err=log.max_of("com_err_norm"), max_tilt=log.max_of("tilt"),
             log=str(path), sha256=file_digest(path)[:16])
    return EXIT_OK if all_completed else EXIT_SCENARIO_FAILED


# --- report --------------------------------------------------------------

def cmd_report(args: argparse.Namespace) -> int:
    from jetaero.cli.report import build_report, load_logs, report_summary_lines

    logs = load_logs([_require_file(p) for p in args.logs])
    report = build_report(logs, args.bin)
    report.write(args.out)
    for line in report_summary_lines(report):
        print(line)
    emit(logs=len(logs), bins=len(report.rows), out=args.out)
    return EXIT_OK


# --- parser --------------------------------------------------------------

COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "generate-dataset": cmd_generate_dataset,
    "fit-axisym": cmd_fit_axisym,
    "train-mlp": cmd_train_mlp,
    "eval-models": cmd_eval_models,
    "simulate": cmd_simulate,
    "report": cmd_report,
}


def _add_split_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", required=True, help="dataset file")
    p.add_argument("--val-dataset", default=None, help="validation dataset (default: split --dataset)")
    p.add_argument("--split", type=float, default=0.8, help="training share when splitting (default 0.8)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jetaero", allow_abbrev=False,
                                     description="Aerodynamic modelling and flight control of a jet-powered humanoid.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--trace", action="store_true", help="route debug traces into the log file")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("generate-dataset", allow_abbrev=False, help="sample the aerodynamic oracle")
    p.add_argument("--model", default="default")
    p.add_argument("--config", default=None, help="oracle key=value file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--interference", type=float, default=None, help="interference amplitude (overrides the file)")
    p.add_argument("--augment", action="store_true", help="append the mirrored samples")
    p.add_argument("--out", required=True)

    p = sub.add_parser("fit-axisym", allow_abbrev=False, help="fit the axisymmetric model")
    p.add_argument("--model", default="default")
    _add_split_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="Lasso penalty (default: cross-validated)")

    p = sub.add_parser("train-mlp", allow_abbrev=False, help="train the force-area network")
    _add_split_flags(p)
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--hidden", type=int, default=9)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--dropout", type=float, default=0.1)
    p.add_argument("--history", default=None, help="loss history CSV (default: next to --out)")

    p = sub.add_parser("eval-models", allow_abbrev=False, help="compare aerodynamic models on a dataset")
    p.add_argument("--model", default="default")
    p.add_argument("--dataset", required=True)
    p.add_argument("--coeffs", default=None)
    p.add_argument("--weights", default=None)
    p.add_argument("--out", default=None, help="per-link error CSV")

    p = sub.add_parser("simulate", allow_abbrev=False, help="run flight scenarios")
    p.add_argument("--scenario", required=True, action="append", help="scenario file (repeatable)")
    p.add_argument("--out-log", default=None)
    p.add_argument("--out-dir", default=None, help="log directory (default: the configured output directory)")
    p.add_argument("--matrix", action="store_true", help="expand each scenario into the ablation matrix")
    p.add_argument("--fictitious", action="store_true", help="add the fictitious-wind hover scenario")
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("report", allow_abbrev=False, help="aggregate simulation logs")
    p.add_argument("--logs", required=True, nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--bin", type=float, default=1.0, help="time-bin width in seconds")
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def dispatch(args: argparse.Namespace) -> int:
    return COMMANDS[args.command](args)
