"""Gabor kernels, filter-bank responses and Gabor-channel descriptors.

The kernel is a complex Gaussian-windowed sinusoid modulated along its s
axis; orientation rotates the (s, t) frame, 0 or 90 degrees. Responses are
complex convolutions with replicate edges, reduced by magnitude and rescaled
per channel to [0, 255] so the downstream gradient encoding stays on
intensity scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import convolve2d

from .config import Descriptor, ExtractionConfig, GaborSpec, LghpParams
from .errors import InvalidParameterError
from .histograms import build_descriptor

# two octave-spaced scales, sigma proportional to wavelength; both orientations
DEFAULT_BANK_SPECS = (
    GaborSpec(frequency=0.25, sigma_s=2.0, sigma_t=2.0, orientation=0),
    GaborSpec(frequency=0.25, sigma_s=2.0, sigma_t=2.0, orientation=90),
    GaborSpec(frequency=0.125, sigma_s=4.0, sigma_t=4.0, orientation=0),
    GaborSpec(frequency=0.125, sigma_s=4.0, sigma_t=4.0, orientation=90),
)


@dataclass(frozen=True, eq=False)
class GaborKernel:
    """Complex taps on an odd square support, rows indexed by t, columns by s."""

    spec: GaborSpec
    taps: np.ndarray


def gabor_kernel(
    frequency: float, sigma_s: float, sigma_t: float, orientation: int
) -> GaborKernel:
    """Sample the kernel on a support of 2 * ceil(3 * max(sigma)) + 1 taps."""
    spec = GaborSpec(frequency, sigma_s, sigma_t, orientation)  # validates
    half = math.ceil(3 * max(sigma_s, sigma_t))
    coords = np.arange(-half, half + 1, dtype=np.float64)
    t, s = np.meshgrid(coords, coords, indexing="ij")
    theta = math.radians(orientation)
    sr = s * math.cos(theta) + t * math.sin(theta)
    tr = -s * math.sin(theta) + t * math.cos(theta)
    amp = 1.0 / (2.0 * math.pi * sigma_s * sigma_t)
    taps = amp * np.exp(
        -0.5 * (sr**2 / sigma_s**2 + tr**2 / sigma_t**2) + 2j * math.pi * frequency * sr
    )
    return GaborKernel(spec, taps)


def bank_from_specs(specs: Sequence[GaborSpec]) -> tuple[GaborKernel, ...]:
    return tuple(
        gabor_kernel(s.frequency, s.sigma_s, s.sigma_t, s.orientation) for s in specs
    )


def default_bank() -> tuple[GaborKernel, ...]:
    return bank_from_specs(DEFAULT_BANK_SPECS)


def convolve_complex(img: np.ndarray, kernel: GaborKernel) -> np.ndarray:
    """True 2-D complex convolution with replicate-edge handling."""
    half = kernel.taps.shape[0] // 2
    padded = np.pad(img.astype(np.float64), half, mode="edge")
    return convolve2d(padded, kernel.taps, mode="valid")


def gabor_responses(
    img: np.ndarray, bank: Sequence[GaborKernel]
) -> list[np.ndarray]:
    """Magnitude responses per kernel, each rescaled to [0, 255].

    A flat magnitude channel (constant input) rescales to all zeros.
    """
    if not bank:
        raise InvalidParameterError("filter bank must not be empty")
    out = []
    for kernel in bank:
        mag = np.abs(convolve_complex(img, kernel))
        lo, hi = float(mag.min()), float(mag.max())
        if hi > lo:
            out.append((mag - lo) * (255.0 / (hi - lo)))
        else:
            out.append(np.zeros_like(mag))
    return out


def build_gabor_descriptor(
    img: np.ndarray, params: LghpParams, bank: Sequence[GaborKernel]
) -> Descriptor:
    """Descriptor per filtered channel, concatenated channel-outermost."""
    responses = gabor_responses(img, bank)
    blocks = [build_descriptor(resp, params).counts for resp in responses]
    config = ExtractionConfig(
        kind="lghp", params=params, gabor_bank=tuple(k.spec for k in bank)
    )
    return Descriptor(np.concatenate(blocks), config)
