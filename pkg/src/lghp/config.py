"""Extraction parameters and the descriptor container shared by the feature modules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

FULL_512 = "full-512"
PAPER_256 = "paper-256"
U2 = "u2"
BINNING_KINDS = (FULL_512, PAPER_256, U2)

_BINS = {FULL_512: 512, PAPER_256: 256, U2: 75}

DESCRIPTOR_KINDS = ("lghp", "lbp")


def bins_per_histogram(binning: str) -> int:
    """Histogram width for a binning scheme (512, 256 or 74+1 catch-all)."""
    if binning not in _BINS:
        raise InvalidParameterError(f"unknown binning scheme: {binning!r}")
    return _BINS[binning]


@dataclass(frozen=True)
class LghpParams:
    """Knobs of the plain descriptor.

    radius_limit is the largest neighborhood distance; maps are built for
    every distance 1..radius_limit. side is the preprocessed image side.
    grid splits the image into grid x grid spatial histogram cells.
    """

    radius_limit: int = 3
    side: int = 64
    binning: str = FULL_512
    grid: int = 1

    def __post_init__(self) -> None:
        if self.radius_limit < 1:
            raise InvalidParameterError("radius_limit must be >= 1")
        if self.grid < 1:
            raise InvalidParameterError("grid must be >= 1")
        if self.binning not in BINNING_KINDS:
            raise InvalidParameterError(f"unknown binning scheme: {self.binning!r}")
        # every histogram cell must keep countable pixels
        if 2 * self.radius_limit >= self.side / self.grid:
            raise InvalidParameterError(
                f"radius_limit {self.radius_limit} too large for side {self.side} "
                f"with grid {self.grid}"
            )


@dataclass(frozen=True)
class GaborSpec:
    """Parameters of one Gabor kernel: frequency, the two spatial sigmas and
    the orientation of the modulation axis (0 or 90 degrees)."""

    frequency: float
    sigma_s: float
    sigma_t: float
    orientation: int

    def __post_init__(self) -> None:
        if self.frequency <= 0:
            raise InvalidParameterError("frequency must be positive")
        if self.sigma_s <= 0 or self.sigma_t <= 0:
            raise InvalidParameterError("sigmas must be positive")
        if self.orientation not in (0, 90):
            raise InvalidParameterError("orientation must be 0 or 90 degrees")


@dataclass(frozen=True)
class ExtractionConfig:
    """Everything that determines a descriptor's layout and values.

    Two descriptors are comparable iff their configs are equal. kind selects
    the pattern family ('lghp' or the plain 'lbp' baseline); an empty
    gabor_bank means extraction runs on the raw image, otherwise one
    descriptor per filtered channel is concatenated channel-outermost.
    """

    kind: str = "lghp"
    params: LghpParams = field(default_factory=LghpParams)
    gabor_bank: tuple[GaborSpec, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in DESCRIPTOR_KINDS:
            raise InvalidParameterError(f"unknown descriptor kind: {self.kind!r}")

    @property
    def gabor_channels(self) -> int:
        return len(self.gabor_bank) if self.gabor_bank else 1

    @property
    def maps_per_channel(self) -> int:
        return 6 * self.params.radius_limit if self.kind == "lghp" else 1

    @property
    def descriptor_length(self) -> int:
        bins = bins_per_histogram(self.params.binning)
        return self.gabor_channels * self.maps_per_channel * self.params.grid ** 2 * bins


@dataclass(frozen=True, eq=False)
class Descriptor:
    """A concatenated histogram vector plus the config that produced it.

    counts holds raw integer occupancy; layout is channel-outermost, then
    distance, then direction pair, then spatial cell, bin innermost.
    """

    counts: np.ndarray
    config: ExtractionConfig

    def __post_init__(self) -> None:
        if self.counts.ndim != 1 or len(self.counts) != self.config.descriptor_length:
            raise InvalidParameterError(
                f"descriptor length {len(self.counts)} does not match config "
                f"({self.config.descriptor_length})"
            )

    def __len__(self) -> int:
        return len(self.counts)
