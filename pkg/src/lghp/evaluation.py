"""Retrieval and recognition protocol: precision/recall at n, class-then-
dataset averages, leave-one-out and probe/gallery recognition rates, k-fold
cross-validation and the noisy-query evaluation.

Retrieval metrics exclude the query from its own ranking; the leave-one-out
recognition protocol keeps it (the self-match occupies rank 1) and scores the
rank-2 entry instead.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .config import ExtractionConfig
from .dataset_io import DatasetManifest
from .errors import (
    ConfigMismatchError,
    DegenerateSplitError,
    EmptyIndexError,
    InvalidParameterError,
    QueryNotInIndexError,
)
from .index_store import DatasetIndex
from .matching import nn_classify, rank_all

DEFAULT_PROBE_FRACTIONS = (0.2, 0.3, 0.4, 0.5, 0.6)


@dataclass(frozen=True)
class SplitSpec:
    """Randomized probe/gallery split: per fold, round(probe_fraction * n)
    images become probes, the rest the gallery."""

    probe_fraction: float
    folds: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.probe_fraction < 1:
            raise InvalidParameterError("probe_fraction must be in (0, 1)")
        if self.folds < 1:
            raise InvalidParameterError("folds must be >= 1")


@dataclass(frozen=True)
class RecognitionRun:
    mode: str  # "loo" or "split"
    probe_fraction: float | None
    fold_gammas: tuple[float, ...]
    mean_gamma: float


@dataclass
class EvalReport:
    apr_at: dict[int, float]
    arr_at: dict[int, float]
    recognition: list[RecognitionRun]


def _check_query_id(query_id: int, index: DatasetIndex) -> None:
    if not 0 <= query_id < len(index):
        raise QueryNotInIndexError(f"image id {query_id} not in index of size {len(index)}")


def _hit_flags(index: DatasetIndex, query_id: int) -> np.ndarray:
    """Same-class flags of the ranked list for one query, self excluded."""
    ranked = rank_all(
        index.descriptor(query_id), index, include_self=False, self_id=query_id
    )
    label = index.labels[query_id]
    return np.array([index.labels[e.image_id] == label for e in ranked], dtype=bool)


def precision_at(query_id: int, index: DatasetIndex, n: int) -> float:
    """Fraction of the top n retrieved images sharing the query's class."""
    _check_query_id(query_id, index)
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    return float(_hit_flags(index, query_id)[:n].sum()) / n


def recall_at(query_id: int, index: DatasetIndex, n: int) -> float:
    """Same-class count in the top n, normalized by the full class size."""
    _check_query_id(query_id, index)
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    class_size = int((index.labels == index.labels[query_id]).sum())
    return float(_hit_flags(index, query_id)[:n].sum()) / class_size


def retrieval_sweep(
    index: DatasetIndex, ns: Sequence[int]
) -> dict[int, tuple[float, float]]:
    """(APR, ARR) for every n, ranking each query once.

    Classes are weighted equally: the per-class mean over its members is
    averaged over classes.
    """
    if len(index) == 0:
        raise EmptyIndexError("index has no entries")
    ns = sorted(set(int(n) for n in ns))
    if not ns or ns[0] < 1:
        raise InvalidParameterError("retrieval depths must be >= 1")
    class_ids = np.unique(index.labels)
    ap = {n: [] for n in ns}  # per-class average precision
    ar = {n: [] for n in ns}
    for cls in class_ids:
        members = np.flatnonzero(index.labels == cls)
        class_size = len(members)
        pr = {n: 0.0 for n in ns}
        re = {n: 0.0 for n in ns}
        for q in members:
            cum = np.cumsum(_hit_flags(index, int(q)))
            for n in ns:
                hits = float(cum[min(n, len(cum)) - 1]) if len(cum) else 0.0
                pr[n] += hits / n
                re[n] += hits / class_size
        for n in ns:
            ap[n].append(pr[n] / class_size)
            ar[n].append(re[n] / class_size)
    return {n: (float(np.mean(ap[n])), float(np.mean(ar[n]))) for n in ns}


def apr(index: DatasetIndex, n: int) -> float:
    """Dataset-level average precision at n, classes weighted equally."""
    return retrieval_sweep(index, [n])[n][0]


def arr(index: DatasetIndex, n: int) -> float:
    """Dataset-level average recall at n, classes weighted equally."""
    return retrieval_sweep(index, [n])[n][1]


def recognition_loo(index: DatasetIndex) -> float:
    """Leave-one-out recognition rate in [0, 100].

    Each image is ranked against the full index including itself; a hit is a
    rank-2 entry of the probe's class.
    """
    if len(index) == 0:
        raise EmptyIndexError("index has no entries")
    hits = 0
    for q in range(len(index)):
        ranked = rank_all(index.descriptor(q), index, include_self=True)
        if len(ranked) >= 2 and index.labels[ranked[1].image_id] == index.labels[q]:
            hits += 1
    return 100.0 * hits / len(index)


def recognition_split(probe: DatasetIndex, gallery: DatasetIndex) -> float:
    """Rank-1 recognition rate of a probe set against a disjoint gallery."""
    if probe.config != gallery.config:
        raise ConfigMismatchError("probe and gallery configs differ")
    if len(probe) == 0 or len(gallery) == 0:
        raise EmptyIndexError("probe and gallery must be non-empty")
    hits = sum(
        1
        for q in range(len(probe))
        if nn_classify(probe.descriptor(q), gallery) == probe.labels[q]
    )
    return 100.0 * hits / len(probe)


def subset_index(index: DatasetIndex, ids: Sequence[int]) -> DatasetIndex:
    """New index over a subset of rows; ids are re-numbered densely."""
    ids = np.asarray(ids, dtype=np.int64)
    return DatasetIndex(
        labels=index.labels[ids].copy(),
        paths=tuple(index.paths[i] for i in ids),
        matrix=index.matrix[ids].copy(),
        config=index.config,
    )


def split_ids(n: int, spec: SplitSpec, fold: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic probe/gallery ids for one fold.

    The generator is seeded by (spec.seed, fold) so folds are independent of
    execution order.
    """
    probe_size = round(spec.probe_fraction * n)
    if probe_size < 1 or probe_size >= n:
        raise DegenerateSplitError(
            f"probe fraction {spec.probe_fraction} leaves an empty side for {n} images"
        )
    rng = np.random.default_rng((spec.seed, fold))
    perm = rng.permutation(n)
    probe = np.sort(perm[:probe_size])
    gallery = np.sort(perm[probe_size:])
    return probe, gallery


def cross_validate(index: DatasetIndex, spec: SplitSpec) -> RecognitionRun:
    """Mean split recognition rate over spec.folds random splits."""
    if len(index) == 0:
        raise EmptyIndexError("index has no entries")
    gammas = []
    for fold in range(spec.folds):
        probe_ids, gallery_ids = split_ids(len(index), spec, fold)
        gamma = recognition_split(
            subset_index(index, probe_ids), subset_index(index, gallery_ids)
        )
        gammas.append(gamma)
    return RecognitionRun(
        mode="split",
        probe_fraction=spec.probe_fraction,
        fold_gammas=tuple(gammas),
        mean_gamma=float(np.mean(gammas)),
    )


def noise_eval(
    manifest: DatasetManifest,
    config: ExtractionConfig,
    variance: float,
    seed: int,
    ns: Sequence[int] = tuple(range(1, 9)),
    threads: int | None = None,
) -> EvalReport:
    """Retrieval sweep over descriptors extracted from noisy images.

    Every image gets white Gaussian noise from a per-image generator seeded
    by seed XOR image_id, then the normal extraction pipeline runs.
    """
    from .pipeline import extract_dataset  # local import to keep modules acyclic

    index = extract_dataset(manifest, config, threads=threads, noise=(variance, seed))
    sweep = retrieval_sweep(index, ns)
    return EvalReport(
        apr_at={n: v[0] for n, v in sweep.items()},
        arr_at={n: v[1] for n, v in sweep.items()},
        recognition=[],
    )


def write_retrieval_csv(sweep: Mapping[int, tuple[float, float]], fh: IO[str]) -> None:
    """Rows of `n,apr,arr`, UTF-8, '.' decimal separator."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["n", "apr", "arr"])
    for n in sorted(sweep):
        writer.writerow([n, f"{sweep[n][0]:.6f}", f"{sweep[n][1]:.6f}"])


def write_recognition_csv(runs: Iterable[RecognitionRun], fh: IO[str]) -> None:
    """Rows of `mode,probe_fraction,fold,gamma`; loo runs leave the split
    columns empty."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["mode", "probe_fraction", "fold", "gamma"])
    for run in runs:
        if run.mode == "loo":
            writer.writerow(["loo", "", "", f"{run.mean_gamma:.6f}"])
        else:
            for fold, gamma in enumerate(run.fold_gammas):
                writer.writerow(
                    ["split", f"{run.probe_fraction:g}", fold, f"{gamma:.6f}"]
                )
