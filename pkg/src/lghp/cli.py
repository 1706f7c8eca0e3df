"""Multi-command front end: index, query, eval, visualize.

All diagnostics go to stderr; data goes to the declared files or stdout.
Every command is deterministic given its flags, including --threads.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from contextlib import nullcontext
from pathlib import Path

from .config import BINNING_KINDS, ExtractionConfig, GaborSpec, LghpParams
from .dataset_io import load_image, scan_dataset, write_pgm
from .descriptor import compute_lghp_maps, render_feature_image
from .errors import InvalidParameterError, LghpError
from .evaluation import (
    DEFAULT_PROBE_FRACTIONS,
    RecognitionRun,
    SplitSpec,
    cross_validate,
    recognition_loo,
    retrieval_sweep,
    write_recognition_csv,
    write_retrieval_csv,
)
from .gabor import DEFAULT_BANK_SPECS
from .index_store import load_index, save_index
from .matching import rank_all
from .pipeline import extract_dataset, extract_descriptor

log = logging.getLogger("lghp")


def _add_extraction_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--descriptor", choices=("lghp", "lbp"), default="lghp")
    parser.add_argument("--radius", type=int, default=3,
                        help="largest neighborhood distance (default 3)")
    parser.add_argument("--side", type=int, default=64,
                        help="resize side in pixels (default 64)")
    parser.add_argument("--binning", choices=BINNING_KINDS, default="full-512")
    parser.add_argument("--grid", type=int, default=1,
                        help="spatial histogram cells per axis (default 1)")
    parser.add_argument("--gabor", action="store_true",
                        help="extract over a Gabor filter bank")
    parser.add_argument("--gabor-scale", action="append", default=None,
                        metavar="F:SIGMA",
                        help="frequency:sigma of one scale, repeatable; each "
                             "scale runs at 0 and 90 degrees")


def _parse_bank(args: argparse.Namespace) -> tuple[GaborSpec, ...]:
    if not args.gabor and not args.gabor_scale:
        return ()
    if not args.gabor_scale:
        return DEFAULT_BANK_SPECS
    specs = []
    for raw in args.gabor_scale:
        try:
            freq_s, sigma_s = raw.split(":")
            freq, sigma = float(freq_s), float(sigma_s)
        except ValueError:
            raise InvalidParameterError(f"cannot parse --gabor-scale {raw!r}, "
                                        f"expected F:SIGMA") from None
        specs.append(GaborSpec(freq, sigma, sigma, 0))
        specs.append(GaborSpec(freq, sigma, sigma, 90))
    return tuple(specs)


def _config_from_args(args: argparse.Namespace) -> ExtractionConfig:
    return ExtractionConfig(
        kind=args.descriptor,
        params=LghpParams(args.radius, args.side, args.binning, args.grid),
        gabor_bank=_parse_bank(args),
    )


def _open_out(spec: str):
    if spec == "-":
        return nullcontext(sys.stdout)
    return open(spec, "w", encoding="utf-8", newline="")


def cmd_index(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    manifest = scan_dataset(args.dataset)
    log.info("indexing %d images from %d classes", len(manifest), len(manifest.class_names))
    start = time.perf_counter()
    index = extract_dataset(manifest, config, threads=args.threads)
    save_index(index, args.output)
    log.info("wrote %s (%d x %d) in %.2fs", args.output, len(index),
             config.descriptor_length, time.perf_counter() - start)
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    index = load_index(args.index)
    query = extract_descriptor(load_image(args.image, index.config.params.side),
                               index.config)
    ranked = rank_all(query, index, include_self=True)[: args.top]
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["image_id", "path", "label", "distance"])
    for entry in ranked:
        writer.writerow([entry.image_id, index.paths[entry.image_id],
                         int(index.labels[entry.image_id]), entry.distance])
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    if args.index and args.dataset:
        raise InvalidParameterError("give either --index or --dataset, not both")
    if args.index:
        if args.noise_variance is not None:
            raise InvalidParameterError("--noise-variance needs --dataset "
                                        "(noise is applied before extraction)")
        index = load_index(args.index)
    elif args.dataset:
        config = _config_from_args(args)
        manifest = scan_dataset(args.dataset)
        noise = None
        if args.noise_variance is not None:
            noise = (args.noise_variance, args.noise_seed)
            log.info("applying noise with variance %g, seed %d", *noise)
        index = extract_dataset(manifest, config, threads=args.threads, noise=noise)
    else:
        raise InvalidParameterError("one of --index or --dataset is required")

    sweep = retrieval_sweep(index, range(1, args.max_n + 1))
    with _open_out(args.retrieval_out) as fh:
        write_retrieval_csv(sweep, fh)

    runs: list[RecognitionRun] = []
    if args.loo:
        gamma = recognition_loo(index)
        runs.append(RecognitionRun("loo", None, (gamma,), gamma))
        log.info("loo gamma: %.2f", gamma)
    if args.splits is not None:
        fractions = [float(f) for f in args.splits.split(",") if f]
        for fraction in fractions:
            run = cross_validate(index, SplitSpec(fraction, args.folds, args.seed))
            runs.append(run)
            log.info("split %.0f%%: mean gamma %.2f over %d folds",
                     100 * fraction, run.mean_gamma, args.folds)
    if runs:
        with _open_out(args.recognition_out) as fh:
            write_recognition_csv(runs, fh)
    return 0


def cmd_visualize(args: argparse.Namespace) -> int:
    img = load_image(args.image, args.side)
    params = LghpParams(radius_limit=args.radius, side=args.side)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.image).stem
    for code_map in compute_lghp_maps(img, params):
        a, b = code_map.pair
        name = f"{stem}_D{code_map.distance}_{a}-{b}.pgm"
        write_pgm(out_dir / name, render_feature_image(code_map))
    log.info("wrote %d feature images to %s", 6 * args.radius, out_dir)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lghp",
        description="Gradient micropattern descriptors with an L1/1-NN "
                    "retrieval and recognition benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="extract descriptors for a dataset")
    p_index.add_argument("--dataset", required=True, help="root/<class>/<image> tree")
    p_index.add_argument("--output", required=True, help="index file to write")
    p_index.add_argument("--threads", type=int, default=None)
    _add_extraction_args(p_index)
    p_index.set_defaults(func=cmd_index)

    p_query = sub.add_parser("query", help="rank an index against one image")
    p_query.add_argument("--index", required=True)
    p_query.add_argument("--image", required=True)
    p_query.add_argument("--top", type=int, default=10)
    p_query.set_defaults(func=cmd_query)

    p_eval = sub.add_parser("eval", help="retrieval and recognition metrics")
    p_eval.add_argument("--index", default=None, help="evaluate a stored index")
    p_eval.add_argument("--dataset", default=None, help="extract then evaluate")
    p_eval.add_argument("--max-n", type=int, default=8,
                        help="retrieval sweep depth (default 8)")
    p_eval.add_argument("--loo", action="store_true",
                        help="leave-one-out recognition rate")
    p_eval.add_argument("--splits", nargs="?", default=None,
                        const=",".join(str(f) for f in DEFAULT_PROBE_FRACTIONS),
                        metavar="F1,F2,...",
                        help="cross-validated probe fractions "
                             "(default 0.2,0.3,0.4,0.5,0.6)")
    p_eval.add_argument("--folds", type=int, default=10)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--noise-variance", type=float, default=None,
                        help="add white Gaussian noise before extraction")
    p_eval.add_argument("--noise-seed", type=int, default=0)
    p_eval.add_argument("--retrieval-out", default="-",
                        help="n,apr,arr CSV file ('-' = stdout)")
    p_eval.add_argument("--recognition-out", default="-",
                        help="mode,probe_fraction,fold,gamma CSV file")
    p_eval.add_argument("--threads", type=int, default=None)
    _add_extraction_args(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_vis = sub.add_parser("visualize", help="write per-map feature images")
    p_vis.add_argument("--image", required=True)
    p_vis.add_argument("--output-dir", required=True)
    p_vis.add_argument("--radius", type=int, default=3)
    p_vis.add_argument("--side", type=int, default=64)
    p_vis.set_defaults(func=cmd_visualize)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LghpError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
