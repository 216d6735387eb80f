"""Command-line entry point: ``twicemix {score,mix,synthset,train,eval,toy}``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import dataset as ds
from .evaluation import evaluate_groups, group_rows, read_scores_csv
from .imgcore import ImageFormatError, list_images, load_image, save_image
from .metrics import score_image
from .mixing import DEFAULT_KS, build_synthetic_testset, mix, validate_ks
from .ranker import ModelFormatError, RankerConfig, init_model, load_model, save_model, score_images, train

log = logging.getLogger("twicemix")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str, n: int | None = None, name: str = "value") -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{name}: expected {n} values, got {len(vals)}")
    return vals


def _ints(text: str, name: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated integers, got {text!r}") from None


def _ks(text: str | None) -> list[float]:
    if text is None:
        return list(DEFAULT_KS)
    try:
        return validate_ks(_floats(text, name="--ks"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def format_k(k: float) -> str:
    return f"{k:g}"


def _write_text(path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def _load_manifest(path):
    try:
        return ds.load_manifest(path)
    except (OSError, ValueError) as exc:
        raise DataError(str(exc)) from None


# --------------------------------------------------------------------------- score

def cmd_score(args) -> int:
    uiqm_w = _floats(args.uiqm_weights, 3, "--uiqm-weights") if args.uiqm_weights else None
    uciqe_w = _floats(args.uciqe_weights, 3, "--uciqe-weights") if args.uciqe_weights else None
    targets: list[tuple[str, Path]] = []
    if args.manifest:
        for e in _load_manifest(args.manifest):
            for role, p in (("raw", e.raw_path), ("hq", e.hq_path), ("lq", e.lq_path)):
                if p is not None:
                    targets.append((f"{e.id}:{role}", p))
    for item in args.inputs:
        p = Path(item)
        if p.is_dir():
            targets.extend((str(f), f) for f in list_images(p))
        else:
            targets.append((str(p), p))
    if not targets:
        raise UsageError("nothing to score: give image files, directories or --manifest")

    lines = []
    for name, path in targets:
        try:
            img = load_image(path)
        except (OSError, ImageFormatError) as exc:
            raise DataError(f"{name}: {exc}") from None
        record = {"image": name, **score_image(img, uiqm_w, uciqe_w).to_dict()}
        lines.append(json.dumps(record))
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --------------------------------------------------------------------------- mix

def cmd_mix(args) -> int:
    if args.k is not None and args.ks is not None:
        raise UsageError("give either --k or --ks, not both")
    ks = [args.k] if args.ks is None else _floats(args.ks, name="--ks")
    if ks == [None]:
        raise UsageError("one of --k or --ks is required")
    if any(not 0.0 <= k <= 1.0 for k in ks):
        raise UsageError(f"mixing ratios must lie in [0, 1], got {ks}")
    try:
        hq, lq = load_image(args.hq), load_image(args.lq)
    except (OSError, ImageFormatError) as exc:
        raise DataError(str(exc)) from None
    if hq.shape != lq.shape:
        raise DataError(f"dimension mismatch: hq {hq.shape[1]}x{hq.shape[0]}, lq {lq.shape[1]}x{lq.shape[0]}")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k in ks:
        path = out / f"mix_{format_k(k)}.png"
        save_image(mix(hq, lq, k), path)
        log.info("wrote %s", path)
    return EXIT_OK


# --------------------------------------------------------------------------- synthset

def _select_entries(entries, train_count):
    if train_count is None:
        return entries
    try:
        return ds.split(entries, ds.SplitSpec(train_count)).test
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_synthset(args) -> int:
    ks = _ks(args.ks)
    entries = _select_entries(_load_manifest(args.manifest), args.train_count)
    if not entries:
        raise DataError("no manifest entries to build a synthetic set from")
    out = Path(args.out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)
    try:
        grades = build_synthetic_testset(ds.synthetic_sources(entries, args.low), ks)
    except (OSError, ImageFormatError, ValueError) as exc:
        raise DataError(str(exc)) from None
    rows = []
    for g in grades:
        rel = Path("images") / f"{g.source_id}_k{format_k(g.k)}.png"
        save_image(g.image, out / rel)
        rows.append((g.source_id, format_k(g.k), g.gt_rank, rel.as_posix()))
    with open(out / "groundtruth.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source_id", "k", "rank", "path"])
        w.writerows(rows)
    log.info("wrote %d graded images for %d sources", len(rows), len(entries))
    return EXIT_OK


def read_groundtruth(directory):
    """Rows ``(source_id, k, rank, absolute_path)`` from ``<dir>/groundtruth.csv``."""
    directory = Path(directory)
    path = directory / "groundtruth.csv"
    if not path.is_file():
        raise DataError(f"missing ground truth: {path}")
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"source_id", "k", "rank", "path"} <= set(reader.fieldnames):
            raise DataError(f"{path}: header must be source_id,k,rank,path")
        for lineno, rec in enumerate(reader, start=2):
            try:
                rows.append((rec["source_id"], float(rec["k"]), int(rec["rank"]), directory / rec["path"]))
            except (TypeError, ValueError):
                raise DataError(f"{path}:{lineno}: malformed row") from None
    if not rows:
        raise DataError(f"{path}: no rows")
    return rows


# --------------------------------------------------------------------------- train

def _ranker_config(args) -> RankerConfig:
    kw = {}
    if args.conv_channels:
        kw["conv_channels"] = _ints(args.conv_channels, "--conv-channels")
    if args.fc_widths:
        kw["fc_widths"] = _ints(args.fc_widths, "--fc-widths")
    for flag, key in (("epochs", "epochs"), ("lr", "learning_rate"), ("epsilon", "epsilon"),
                      ("seed", "seed")):
        val = getattr(args, flag)
        if val is not None:
            kw[key] = val
    if args.max_side is not None:
        kw["max_side"] = None if args.max_side == 0 else args.max_side
    try:
        return RankerConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_train(args) -> int:
    config = _ranker_config(args)
    entries = _load_manifest(args.manifest)
    train_count = args.train_count if args.train_count is not None else len(entries)
    try:
        parts = ds.split(entries, ds.SplitSpec(train_count))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if parts.excluded:
        log.warning("%d training entries have no LQ image and were skipped: %s",
                    len(parts.excluded), ", ".join(parts.excluded))
    if not parts.train:
        raise DataError("no trainable pairs: every entry in the training range lacks an LQ image")
    try:
        pairs = ds.load_training_pairs(parts.train)
    except (OSError, ImageFormatError, ValueError) as exc:
        raise DataError(str(exc)) from None
    model, history = train(init_model(config), pairs, config)
    save_model(model, args.out)
    if args.log:
        _write_text(args.log, history.to_csv())
    log.info("trained on %d pairs for %d epochs; model written to %s", len(pairs), config.epochs, args.out)
    return EXIT_OK


# --------------------------------------------------------------------------- eval

def cmd_eval(args) -> int:
    if args.scores:
        if args.synthset or args.model or args.metric:
            raise UsageError("--scores cannot be combined with --synthset/--model/--metric")
        try:
            rankings = read_scores_csv(args.scores)
        except (OSError, ValueError) as exc:
            raise DataError(str(exc)) from None
    else:
        if not args.synthset:
            raise UsageError("give --scores CSV or --synthset DIR")
        if bool(args.model) == bool(args.metric):
            raise UsageError("give exactly one of --model or --metric")
        gt = read_groundtruth(args.synthset)
        try:
            images = [load_image(p) for _, _, _, p in gt]
        except (OSError, ImageFormatError) as exc:
            raise DataError(str(exc)) from None
        if args.model:
            try:
                model = load_model(args.model)
            except (OSError, ModelFormatError) as exc:
                raise DataError(f"cannot load model: {exc}") from None
            scores = score_images(model, images)
        else:
            scores = [getattr(score_image(im), args.metric) for im in images]
        rows = [(sid, f"{sid}_k{format_k(k)}", float(s), rank)
                for (sid, k, rank, _), s in zip(gt, scores)]
        if args.scores_out:
            with open(args.scores_out, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["group_id", "item_id", "score", "gt_rank"])
                w.writerows((g, i, repr(s), r) for g, i, s, r in rows)
        rankings = group_rows(rows)
    try:
        report = evaluate_groups(rankings)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    if args.out:
        _write_text(args.out, report.to_json() + "\n")
    print(report.format_table())
    return EXIT_OK


# --------------------------------------------------------------------------- toy

def cmd_toy(args) -> int:
    from .toy import KINDS, write_corpus

    kinds = tuple(k.strip() for k in args.kinds.split(","))
    if any(k not in KINDS for k in kinds):
        raise UsageError(f"--kinds must be drawn from {KINDS}")
    drop = {f"s{i:04d}" for i in _ints(args.drop_lq, "--drop-lq")} if args.drop_lq else ()
    manifest = write_corpus(args.out_dir, args.n, args.seed, args.size, kinds, drop)
    print(manifest)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="twicemix", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("score", help="UIQM/UCIQE breakdown per image as JSON lines")
    s.add_argument("inputs", nargs="*", help="image files or directories")
    s.add_argument("--manifest", help="score every image referenced by a manifest")
    s.add_argument("--uiqm-weights", help="c1,c2,c3 override")
    s.add_argument("--uciqe-weights", help="c1,c2,c3 override")
    s.add_argument("--out", help="write JSON lines here instead of stdout")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("mix", help="write k*hq + (1-k)*lq for one or more ratios")
    s.add_argument("--hq", required=True)
    s.add_argument("--lq", required=True)
    s.add_argument("--k", type=float)
    s.add_argument("--ks", help="comma-separated ratios")
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_mix)

    s = sub.add_parser("synthset", help="fixed-ratio synthetic test set with ground truth")
    s.add_argument("--manifest", required=True)
    s.add_argument("--ks", help="strictly increasing ratios (default 0,0.2,0.4,0.6,0.8)")
    s.add_argument("--low", choices=ds.LOW_ENDPOINTS, default="lq",
                   help="low-quality endpoint; 'lq' falls back to raw when LQ is absent")
    s.add_argument("--train-count", type=int,
                   help="skip the first N entries (the training split)")
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_synthset)

    s = sub.add_parser("train", help="train the Siamese ranker on a manifest")
    s.add_argument("--manifest", required=True)
    s.add_argument("--out", required=True, help="model JSON path")
    s.add_argument("--log", help="per-epoch mean loss CSV")
    s.add_argument("--train-count", type=int, help="use the first N entries (default: all)")
    s.add_argument("--epochs", type=int)
    s.add_argument("--lr", type=float)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--conv-channels")
    s.add_argument("--fc-widths")
    s.add_argument("--max-side", type=int, help="downscale bound; 0 disables")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("eval", help="KRCC/SRCC report over ranking groups")
    s.add_argument("--scores", help="CSV with group_id,item_id,score,gt_rank")
    s.add_argument("--synthset", help="directory written by 'synthset'")
    s.add_argument("--model", help="model JSON used to score the synthset")
    s.add_argument("--metric", choices=("uiqm", "uciqe"), help="rank with a baseline instead")
    s.add_argument("--out", help="report JSON path")
    s.add_argument("--scores-out", help="also write the per-image scores CSV")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("toy", help="write a procedural raw/HQ/LQ corpus and manifest")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--n", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--size", type=int, default=64)
    s.add_argument("--kinds", default="hazy", help="comma-separated: hazy,overenhanced")
    s.add_argument("--drop-lq", help="comma-separated source indices written without LQ")
    s.set_defaults(func=cmd_toy)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"twicemix {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"twicemix {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
