"""Command-line front end: ``botsense generate|train|evaluate|predict|experiments``.

Exit codes are 0 on success, 2 on usage errors and 1 on runtime failures.
Every written artifact gets a ``<artifact>.manifest.json`` next to it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .datagen import default_mix, generate, load_profiles
from .experiments import run_grid, run_style_breakdown
from .features import FeatureSet, extract_player_vectors
from .logmodel import LogFormatError, read_log, write_log
from .metrics import dump_json, evaluation_report, render_evaluation, style_report
from .pipeline import (
    evaluate,
    load_model,
    route,
    save_model,
    select_k,
    train_ensemble,
    train_global,
    undersample,
)
from .svm import SvmConfig

log = logging.getLogger("botsense")


@dataclass
class RunManifest:
    command: str
    flags: dict
    seeds: list[int]
    inputs: list[str]
    outputs: list[str]
    version: str = __version__
    started: float = 0.0
    duration_seconds: float = 0.0
    extra: dict = field(default_factory=dict)


def manifest_path(artifact) -> Path:
    artifact = Path(artifact)
    return artifact.with_name(artifact.name + ".manifest.json")


def _write_manifests(manifest: RunManifest, started: float) -> None:
    manifest.started = started
    manifest.duration_seconds = time.time() - started
    doc = asdict(manifest)
    for out in manifest.outputs:
        dump_json(doc, manifest_path(out))


def _prepare(path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _flags(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _feature_set(text: str) -> FeatureSet:
    try:
        return FeatureSet.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _svm_config(args) -> SvmConfig:
    return SvmConfig(c=args.c, kernel=args.kernel, gamma=args.gamma)


# -- commands ----------------------------------------------------------------


def cmd_generate(args) -> None:
    started = time.time()
    profiles = load_profiles(args.profiles) if args.profiles else load_profiles()
    session = tuple(args.session) if args.session else None
    cfg = default_mix(args.players, seed=args.seed, profiles=profiles, session=session)
    out = _prepare(args.out)
    write_log(generate(cfg), out, args.format)
    _write_manifests(
        RunManifest(
            "generate", _flags(args), [args.seed], [args.profiles] if args.profiles else [], [str(out)],
            extra={"players_per_cell": {f"{s}/{'bot' if b else 'human'}": n
                                        for (s, b), n in cfg.players_per_cell.items()}},
        ),
        started,
    )


def _load_vectors(path):
    return extract_player_vectors(read_log(path))


def cmd_train(args) -> None:
    started = time.time()
    vectors = undersample(_load_vectors(args.logs), args.seed)
    cfg = _svm_config(args)
    out = _prepare(args.out)
    outputs = [str(out)]
    extra = {"players": len(vectors)}
    if args.global_:
        model = train_global(vectors, args.feature_set, args.seed, cfg)
    elif args.k is not None:
        if not 1 <= args.k <= len(vectors):
            raise ValueError(f"k={args.k} is out of range [1, {len(vectors)}]")
        model = train_ensemble(vectors, args.feature_set, args.k, args.seed, cfg)
    else:
        model, report, test_metrics = select_k(vectors, args.feature_set, args.seed, svm_config=cfg)
        report_path = _prepare(args.report) if args.report else out.with_name(out.stem + ".selection.json")
        doc = report.to_dict()
        doc["test_metrics"] = test_metrics
        dump_json(doc, report_path)
        outputs.append(str(report_path))
        extra["chosen_k"] = report.chosen_k
    save_model(model, out)
    _write_manifests(RunManifest("train", _flags(args), [args.seed], [args.logs], outputs, extra=extra), started)


def cmd_evaluate(args) -> None:
    started = time.time()
    model = load_model(args.model)
    vectors = _load_vectors(args.logs)
    if any(v.label is None for v in vectors):
        raise ValueError("evaluation requires labels")
    cm, routing = evaluate(model, vectors)
    styles = style_report(
        ((p, v.label, v.style) for p, v in zip(routing.predicted, vectors)),
        ((v.style, int(c)) for v, c in zip(vectors, routing.clusters)),
        model.k,
    )
    report = evaluation_report(
        cm, styles, {"model": str(args.model), "feature_set": model.feature_set.value, "k": model.k}
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path, text_path = out_dir / "report.json", out_dir / "report.txt"
    dump_json(report, json_path)
    text_path.write_text(render_evaluation(report), encoding="utf-8")
    _write_manifests(
        RunManifest("evaluate", _flags(args), [model.training_seed], [args.model, args.logs],
                    [str(json_path), str(text_path)]),
        started,
    )


def cmd_predict(args) -> None:
    started = time.time()
    model = load_model(args.model)
    vectors = _load_vectors(args.logs)
    routing = route(model, vectors)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["player_id", "predicted", "cluster", "decision_value"])
    for v, pred, cl, dv in zip(vectors, routing.predicted, routing.clusters, routing.decision):
        writer.writerow([v.player_id, pred, int(cl), "" if math.isnan(dv) else repr(float(dv))])
    out = _prepare(args.out)
    out.write_text(buf.getvalue(), encoding="utf-8")
    _write_manifests(
        RunManifest("predict", _flags(args), [model.training_seed], [args.model, args.logs], [str(out)]),
        started,
    )


def cmd_grid(args) -> None:
    started = time.time()
    seeds = list(range(args.first_seed, args.first_seed + args.seeds))
    out_dir = Path(args.out_dir)
    run_grid(out_dir, seeds, players=args.players)
    _write_manifests(
        RunManifest("experiments grid", _flags(args), seeds, [],
                    [str(out_dir / "grid.json"), str(out_dir / "grid.txt")]),
        started,
    )


def cmd_styles(args) -> None:
    started = time.time()
    in_dir = Path(args.in_dir)
    report = run_style_breakdown(in_dir)
    _write_manifests(
        RunManifest("experiments styles", _flags(args), report["seeds"], [str(in_dir / "grid.json")],
                    [str(in_dir / "styles.json"), str(in_dir / "styles.txt")]),
        started,
    )


# -- parser ------------------------------------------------------------------


def _add_svm_flags(p):
    p.add_argument("--c", type=float, default=SvmConfig.c, help="SVM box constraint")
    p.add_argument("--kernel", choices=("linear", "rbf"), default=SvmConfig.kernel)
    p.add_argument("--gamma", type=float, default=None, help="RBF width (default 1/d)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="botsense", description="Play-style aware game bot detection.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic labeled behavior log")
    p.add_argument("--out", required=True)
    p.add_argument("--players", type=_positive, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--format", choices=("csv", "jsonl"), default=None, help="default: from extension")
    p.add_argument("--profiles", help="archetype profile JSON overriding the packaged defaults")
    p.add_argument("--session", type=_positive, nargs=2, metavar=("MIN", "MAX"),
                   help="samples per player, overriding every profile")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train a local ensemble or the global baseline")
    p.add_argument("--logs", required=True)
    p.add_argument("--feature-set", type=_feature_set, required=True, help="f17, f12, f5, fb, fm or fc")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--report", help="selection report path (with --select-k)")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--k", type=int)
    mode.add_argument("--select-k", action="store_true")
    mode.add_argument("--global", dest="global_", action="store_true")
    _add_svm_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a model on labeled logs")
    p.add_argument("--model", required=True)
    p.add_argument("--logs", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="classify every player of a log")
    p.add_argument("--model", required=True)
    p.add_argument("--logs", required=True)
    p.add_argument("--out", required=True, help="CSV path")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("experiments", help="feature-set x method grid and style breakdown")
    exp = p.add_subparsers(dest="experiment", required=True)
    g = exp.add_parser("grid")
    g.add_argument("--seeds", type=_positive, default=5, help="number of seeds")
    g.add_argument("--first-seed", type=int, default=0)
    g.add_argument("--players", type=_positive, default=2000)
    g.add_argument("--out-dir", required=True)
    g.set_defaults(func=cmd_grid)
    s = exp.add_parser("styles")
    s.add_argument("--in-dir", required=True)
    s.set_defaults(func=cmd_styles)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "generate" and args.players < 8:
        parser.print_usage(sys.stderr)
        print("botsense: error: --players must be at least 8", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except (ValueError, LogFormatError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"botsense: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
