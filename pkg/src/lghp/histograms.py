"""Spatial histograms over code maps and descriptor assembly.

Counting region: a map contributes the pixels at least `distance` from every
border (the ring-reach region). The outer part of that region, where the full
2*distance reach is missing, holds the boundary code 0 by construction; the
band has identical geometry for every image of the same size, so it shifts
bin 0 by the same amount everywhere and cancels in L1 comparisons.
"""

from __future__ import annotations

import numpy as np

from .config import (
    FULL_512,
    PAPER_256,
    U2,
    Descriptor,
    ExtractionConfig,
    LghpParams,
    bins_per_histogram,
)
from .descriptor import PatternCodeMap, compute_lbp_baseline, compute_lghp_maps
from .errors import CodeOutOfRangeError, EmptyCellError, InvalidParameterError


def _circular_transitions(code: int) -> int:
    bits = [(code >> i) & 1 for i in range(9)]
    return sum(bits[i] != bits[(i + 1) % 9] for i in range(9))


def _build_u2_table() -> np.ndarray:
    uniform = [c for c in range(512) if _circular_transitions(c) <= 2]
    table = np.full(512, len(uniform), dtype=np.int64)
    for rank, code in enumerate(uniform):
        table[code] = rank
    return table


# 74 circularly uniform 9-bit codes in ascending order, then one catch-all bin
U2_TABLE = _build_u2_table()


def u2_bin(code: int) -> int:
    """Bin index of a 9-bit code under uniform-2 minimization.

    Codes whose 9-bit string, read circularly, has at most two transitions
    get their ascending rank in 0..73; everything else lands in bin 74.
    """
    if not 0 <= code < 512:
        raise CodeOutOfRangeError(f"code must be in [0, 512), got {code}")
    return int(U2_TABLE[code])


def _binned(codes: np.ndarray, binning: str) -> np.ndarray:
    if binning == FULL_512:
        return codes.astype(np.int64)
    if binning == PAPER_256:
        return codes.astype(np.int64) & 0xFF  # drop the center bit
    if binning == U2:
        return U2_TABLE[codes.astype(np.int64)]
    raise InvalidParameterError(f"unknown binning scheme: {binning!r}")


def histogram_map(code_map: PatternCodeMap, binning: str, grid: int = 1) -> np.ndarray:
    """Per-cell histograms of one code map, shape (grid * grid, bins).

    The image extent is split into grid x grid cells (remainder pixels go to
    the last cell); only pixels inside the counting region are binned.
    Raises EmptyCellError if a cell lies entirely outside it.
    """
    codes = code_map.codes
    h, w = codes.shape
    margin = code_map.distance
    bins = bins_per_histogram(binning)
    ch, cw = h // grid, w // grid
    out = np.zeros((grid * grid, bins), dtype=np.int64)
    for row in range(grid):
        r0, r1 = row * ch, (row + 1) * ch if row < grid - 1 else h
        r0, r1 = max(r0, margin), min(r1, h - margin)
        for col in range(grid):
            c0, c1 = col * cw, (col + 1) * cw if col < grid - 1 else w
            c0, c1 = max(c0, margin), min(c1, w - margin)
            if r0 >= r1 or c0 >= c1:
                raise EmptyCellError(
                    f"cell ({row}, {col}) has no countable pixels "
                    f"(margin {margin}, grid {grid})"
                )
            vals = _binned(codes[r0:r1, c0:c1].ravel(), binning)
            out[row * grid + col] = np.bincount(vals, minlength=bins)
    return out


def descriptor_counts(maps: list[PatternCodeMap], binning: str, grid: int) -> np.ndarray:
    """Concatenate per-map cell histograms in map order, bin innermost."""
    blocks = [histogram_map(m, binning, grid).ravel() for m in maps]
    return np.concatenate(blocks)


def build_descriptor(img: np.ndarray, params: LghpParams) -> Descriptor:
    """Full descriptor of one image: 6 * radius_limit maps, histogrammed and
    concatenated distance-major, pair, cell, bin innermost."""
    maps = compute_lghp_maps(img, params)
    counts = descriptor_counts(maps, params.binning, params.grid)
    return Descriptor(counts, ExtractionConfig(kind="lghp", params=params))


def build_lbp_descriptor(img: np.ndarray, params: LghpParams) -> Descriptor:
    """Histogram descriptor over the single LBP baseline map."""
    counts = descriptor_counts([compute_lbp_baseline(img)], params.binning, params.grid)
    return Descriptor(counts, ExtractionConfig(kind="lbp", params=params))
