"""Batch extraction: manifest in, dataset index out.

Work items are independent per image. Extraction is CPU-bound in small numpy
kernels, where Python threads only fight over the interpreter lock, so the
pool uses worker processes; results keep manifest order and are bit-identical
for any worker count.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache, partial

import numpy as np

from .config import Descriptor, ExtractionConfig
from .dataset_io import DatasetManifest, ManifestEntry, add_awgn, load_image
from .gabor import bank_from_specs, build_gabor_descriptor
from .histograms import build_descriptor, build_lbp_descriptor
from .index_store import DatasetIndex

log = logging.getLogger(__name__)


@lru_cache(maxsize=8)
def _cached_bank(specs):
    return bank_from_specs(specs)


def extract_descriptor(img: np.ndarray, config: ExtractionConfig) -> Descriptor:
    """Descriptor of one preprocessed image under the given config."""
    if config.gabor_bank:
        return build_gabor_descriptor(img, config.params, _cached_bank(config.gabor_bank))
    if config.kind == "lbp":
        return build_lbp_descriptor(img, config.params)
    return build_descriptor(img, config.params)


def _describe_entry(
    root: str,
    config: ExtractionConfig,
    noise: tuple[float, int] | None,
    entry: ManifestEntry,
) -> np.ndarray:
    img = load_image(os.path.join(root, entry.path), config.params.side)
    if noise is not None:
        variance, seed = noise
        img = add_awgn(img, variance, seed ^ entry.image_id)
    return extract_descriptor(img, config).counts


def extract_dataset(
    manifest: DatasetManifest,
    config: ExtractionConfig,
    threads: int | None = None,
    noise: tuple[float, int] | None = None,
) -> DatasetIndex:
    """Load, preprocess and describe every manifest entry.

    threads sizes the worker pool (default: hardware parallelism). noise,
    when given, is (variance, seed): each image gets white Gaussian noise
    from a generator seeded by seed XOR image_id before extraction.
    """
    workers = (os.cpu_count() or 1) if threads is None else max(1, threads)
    work = partial(_describe_entry, str(manifest.root), config, noise)

    start = time.perf_counter()
    if workers == 1 or len(manifest) < 2 * workers:
        rows = [work(entry) for entry in manifest.entries]
    else:
        chunk = max(1, math.ceil(len(manifest) / (workers * 8)))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(work, manifest.entries, chunksize=chunk))
    log.info(
        "extracted %d descriptors in %.2fs (%d workers)",
        len(rows), time.perf_counter() - start, workers,
    )

    if rows:
        matrix = np.stack(rows).astype(np.int64)
    else:
        matrix = np.zeros((0, config.descriptor_length), dtype=np.int64)
    return DatasetIndex(
        labels=np.array([e.label for e in manifest.entries], dtype=np.int64),
        paths=tuple(e.path for e in manifest.entries),
        matrix=matrix,
        config=config,
    )
