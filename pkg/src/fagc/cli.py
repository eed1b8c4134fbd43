"""Command-line pipeline: synth -> project -> fit -> augment -> eval.

Every command is deterministic given its flags (randomness flows only from
--seed, default 0) and writes a JSON run manifest next to its primary
output. Exit codes: 0 success, 2 input-format error, 3 domain/degeneracy
error.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .augment import Category, LabeledDataset, derive_subseed, sample_curve
from .errors import FagcError, InputFormatError, TooFewPoints
from .evaluation import LossConfig, SynthSpec, TrainConfig, evaluate, synth_raw
from .fileio import (
    RunManifest,
    manifest_path,
    read_curves_csv,
    read_feature_csv,
    read_preshape_csv,
    report_summary,
    sha256_file,
    write_curves_csv,
    write_feature_csv,
    write_preshape_csv,
)
from .geodesic import FitConfig, fit_curve, point_to_curve_distance
from .preshape import project

LAMBDA_GRID = (0.0, 0.1, 0.3, 0.45, 0.5, 0.55, 0.7, 0.9, 1.0)
K_GRID = (10, 100, 400, 1000, 2000)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FagcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fagc",
        description="Project features to the pre-shape sphere, fit per-category "
        "geodesic curves, sample augmented features, and evaluate the gain.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic raw feature CSVs")
    p.add_argument("--categories", type=int, default=5)
    p.add_argument("--per-category", type=int, default=4)
    p.add_argument("--test-per-category", type=int, default=0)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--kappa", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("project", help="project a feature CSV onto the pre-shape sphere")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("fit", help="fit one geodesic curve per label of a pre-shape CSV")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--candidates", type=int, default=100, metavar="S")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("augment", help="sample augmented pre-shapes from a curve file")
    p.add_argument("curves")
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--verify", action="store_true", help="recheck samples lie on their curves")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("eval", help="compare classifier accuracy with and without augmentation")
    p.add_argument("--real", required=True, help="pre-shape CSV of real training data")
    p.add_argument("--test", required=True, help="pre-shape CSV of test data")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--augmented", help="pre-shape CSV of augmented training data")
    src.add_argument("--curves", help="curve file; augmented data is sampled per seed")
    p.add_argument("--classifier", choices=("softmax", "knn"), default="softmax")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--k", type=int, default=100, help="samples per category when --curves is used")
    p.add_argument("--knn-k", type=int, default=1)
    p.add_argument("--seeds", type=int, default=1, help="number of evaluation seeds")
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument(
        "--sweep-lambda", nargs="?", const="default", default=None, metavar="GRID",
        help="sweep the influence factor (comma list, default grid)",
    )
    p.add_argument(
        "--sweep-k", nargs="?", const="default", default=None, metavar="GRID",
        help="sweep the per-category sample count; needs --curves (comma list, default grid)",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    return parser


def cmd_synth(args) -> int:
    t0 = time.perf_counter()
    spec = SynthSpec(
        n_categories=args.categories,
        samples_per_category=args.per_category,
        raw_dim=args.dim,
        kappa=args.kappa,
        seed=args.seed,
    )
    counts = (spec.samples_per_category,)
    if args.test_per_category > 0:
        if not args.test_out:
            raise InputFormatError("--test-per-category requires --test-out")
        counts = (spec.samples_per_category, args.test_per_category)
    blocks = synth_raw(spec, counts)
    n = spec.n_categories
    train_rows = [(label, row) for label, rows in blocks[:n] for row in rows]
    write_feature_csv(args.train_out, train_rows)
    outputs = [args.train_out]
    if len(counts) == 2:
        test_rows = [(label, row) for label, rows in blocks[n:] for row in rows]
        write_feature_csv(args.test_out, test_rows)
        outputs.append(args.test_out)
    print(f"synth: wrote {len(train_rows)} train rows" + (f", {len(test_rows)} test rows" if len(counts) == 2 else ""))
    _write_manifest(args, inputs=[], outputs=outputs, started=t0)
    return 0


def cmd_project(args) -> int:
    t0 = time.perf_counter()
    features = read_feature_csv(args.input)
    rows = []
    for i, (label, raw) in enumerate(features, start=2):
        z = project(raw)
        rows.append((label, z, "real"))
        print(f"row {i}: label={label} dim {raw.size} -> {z.size} ok")
    write_preshape_csv(args.out, rows)
    print(f"project: {len(rows)} rows, all pre-shape invariants satisfied")
    _write_manifest(args, inputs=[args.input], outputs=[args.out], started=t0)
    return 0


def cmd_fit(args) -> int:
    t0 = time.perf_counter()
    data = read_preshape_csv(args.input)
    config = FitConfig(num_candidates=args.candidates, tol=args.tol, max_iters=args.max_iters)

    def fit_one(cat):
        if len(cat.members) < 3:
            raise TooFewPoints(
                f"label {cat.label!r} has {len(cat.members)} rows; need >= 3 to fit"
            )
        try:
            return cat.label, fit_curve(cat.members, config)
        except FagcError as exc:
            raise type(exc)(f"label {cat.label!r}: {exc}") from exc

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = dict(pool.map(fit_one, data.categories))
    else:
        results = dict(map(fit_one, data.categories))

    curves = {label: cr[0] for label, cr in results.items()}
    reports = {label: cr[1] for label, cr in results.items()}
    write_curves_csv(args.out, curves, {label: r.best_residual for label, r in reports.items()})
    for label in sorted(curves):
        r = reports[label]
        print(
            f"fit: label={label} iters={r.iterations} converged={r.converged} "
            f"residual={r.best_residual:.6e}"
        )
    _write_manifest(
        args,
        inputs=[args.input],
        outputs=[args.out],
        started=t0,
        fit_reports={label: report_summary(r) for label, r in reports.items()},
    )
    return 0


def cmd_augment(args) -> int:
    t0 = time.perf_counter()
    curves = read_curves_csv(args.curves)
    rows = []
    for label in sorted(curves):
        curve, _ = curves[label]
        samples = sample_curve(curve, args.k, derive_subseed(args.seed, label))
        if args.verify:
            worst = max(point_to_curve_distance(s, curve) for s in samples)
            if worst >= 1e-9:
                raise FagcError(
                    f"label {label!r}: sample {worst!r} rad off its curve (>= 1e-9)"
                )
        rows.extend((label, s, "augmented") for s in samples)
    write_preshape_csv(args.out, rows)
    print(f"augment: wrote {len(rows)} rows ({args.k} per label, {len(curves)} labels)")
    _write_manifest(args, inputs=[args.curves], outputs=[args.out], started=t0)
    return 0


def cmd_eval(args) -> int:
    t0 = time.perf_counter()
    real = read_preshape_csv(args.real)
    test = read_preshape_csv(args.test)
    inputs = [args.real, args.test]
    fixed_aug = None
    curves = None
    if args.augmented:
        fixed_aug = read_preshape_csv(args.augmented)
        inputs.append(args.augmented)
    else:
        curves = read_curves_csv(args.curves)
        inputs.append(args.curves)

    if args.sweep_k is not None and args.sweep_lambda is not None:
        raise InputFormatError("--sweep-k and --sweep-lambda are mutually exclusive")
    if args.sweep_k is not None:
        if curves is None:
            raise InputFormatError("--sweep-k needs --curves to sample from")
        sweep = [("k", k) for k in _parse_grid(args.sweep_k, K_GRID, int)]
    elif args.sweep_lambda is not None:
        sweep = [("lambda", lam) for lam in _parse_grid(args.sweep_lambda, LAMBDA_GRID, float)]
    else:
        sweep = [("none", "")]

    train_cfg = TrainConfig(learning_rate=args.lr, epochs=args.epochs)
    out_rows = [
        ["param", "value", "stat", "seed", "classifier", "lambda", "k",
         "acc_baseline", "acc_augmented", "gain"]
    ]
    for param, value in sweep:
        lam = value if param == "lambda" else args.lam
        k = value if param == "k" else args.k
        base_accs, aug_accs = [], []
        for i in range(args.seeds):
            seed_i = args.seed + i
            aug = fixed_aug if fixed_aug is not None else _sample_from_curves(curves, k, seed_i)
            cfg = LossConfig(lam=lam, seed=seed_i)
            base = evaluate(real, None, test, args.classifier, cfg, train_cfg, args.knn_k)
            with_aug = evaluate(real, aug, test, args.classifier, cfg, train_cfg, args.knn_k)
            base_accs.append(base)
            aug_accs.append(with_aug)
            out_rows.append(
                [param, _cell(value), "seed", str(seed_i), args.classifier, _cell(lam),
                 _cell(k if fixed_aug is None else ""), _cell(base), _cell(with_aug),
                 _cell(with_aug - base)]
            )
        base_mean, aug_mean = float(np.mean(base_accs)), float(np.mean(aug_accs))
        gains = np.asarray(aug_accs) - np.asarray(base_accs)
        sem = float(np.std(gains, ddof=1) / np.sqrt(len(gains))) if len(gains) > 1 else ""
        out_rows.append(
            [param, _cell(value), "mean", "", args.classifier, _cell(lam),
             _cell(k if fixed_aug is None else ""), _cell(base_mean), _cell(aug_mean),
             _cell(float(gains.mean()))]
        )
        out_rows.append(
            [param, _cell(value), "sem", "", args.classifier, _cell(lam),
             _cell(k if fixed_aug is None else ""), "", "", _cell(sem)]
        )
        print(
            f"eval: {param}={value if value != '' else '-'} classifier={args.classifier} "
            f"baseline={base_mean:.4f} augmented={aug_mean:.4f} gain={gains.mean():+.4f}"
        )

    with open(args.out, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(out_rows)
    _write_manifest(args, inputs=inputs, outputs=[args.out], started=t0)
    return 0


def _sample_from_curves(curves, k: int, seed: int) -> LabeledDataset:
    cats = [
        Category(label, sample_curve(curve, k, derive_subseed(seed, label)),
                 ("augmented",) * k)
        for label, (curve, _) in sorted(curves.items())
    ]
    return LabeledDataset(cats)


def _parse_grid(raw: str, default, cast):
    if raw == "default":
        return list(default)
    try:
        return [cast(tok) for tok in raw.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise InputFormatError(f"bad sweep grid {raw!r}: {exc}") from exc


def _cell(x) -> str:
    if x == "":
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.17g}"


def _write_manifest(args, inputs, outputs, started, fit_reports=None) -> None:
    config = {
        k: v for k, v in vars(args).items() if k not in ("func",) and not callable(v)
    }
    manifest = RunManifest(
        tool_version=__version__,
        command=args.command,
        config=config,
        fit_reports=fit_reports or {},
        input_digests={str(p): sha256_file(p) for p in inputs},
        output_digests={str(p): sha256_file(p) for p in outputs},
        duration_seconds=time.perf_counter() - started,
    )
    manifest.write(manifest_path(outputs[0]))


if __name__ == "__main__":
    sys.exit(main())
