"""Directional gradient fields and 9-bit micropattern code maps.

Conventions, pinned here once for the whole package:

- Image coordinates are (x right, y down). Direction angles run
  counterclockwise from +x, so the unit steps are 0 deg -> (+1, 0),
  45 deg -> (+1, -1), 90 deg -> (0, -1), 135 deg -> (-1, -1).
- A gradient at distance d is center minus the pixel d steps along the
  direction.
- The eight ring neighbors of a pixel sit on the square ring at Chebyshev
  distance d, numbered 1..8 starting east and proceeding counterclockwise.
- A code packs nine strict greater-than comparisons between two gradient
  fields: the center comparison in the most significant bit, then the ring
  neighbors in order down to bit 0.
- Codes are computed only where every pixel within Chebyshev reach 2*d
  exists (no padding); all other positions hold 0. Histogramming counts the
  wider ring-reach region, see histograms.py.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import LghpParams
from .errors import DistanceTooLargeError, InvalidParameterError

DIRECTIONS = (0, 45, 90, 135)

# the six ordered direction pairs, in concatenation order
DIRECTION_PAIRS = ((0, 45), (0, 90), (0, 135), (45, 90), (45, 135), (90, 135))

_STEPS = {0: (1, 0), 45: (1, -1), 90: (0, -1), 135: (-1, -1)}

# ring neighbors 1..8: east, then counterclockwise in 45 degree steps
_RING = ((1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1))


@dataclass(frozen=True, eq=False)
class GradientField:
    """Signed directional differences; a border band of width `distance`
    (on the sides the offset points to) is undefined and stored as 0."""

    direction: int
    distance: int
    values: np.ndarray
    valid_margin: int


@dataclass(frozen=True, eq=False)
class PatternCodeMap:
    """Per-pixel 9-bit codes for one direction pair at one distance.

    valid_margin is the border width where no code can be computed because
    a required pixel at reach 2*distance falls outside the image; those
    positions hold 0. pair is None for the LBP baseline map.
    """

    pair: tuple[int, int] | None
    distance: int
    codes: np.ndarray
    valid_margin: int


def _shifted(arr: np.ndarray, ox: int, oy: int) -> np.ndarray:
    """arr sampled at (x + ox, y + oy); out-of-range positions become 0."""
    h, w = arr.shape
    out = np.zeros_like(arr)
    x0, x1 = max(0, -ox), min(w, w - ox)
    y0, y1 = max(0, -oy), min(h, h - oy)
    if x0 < x1 and y0 < y1:
        out[y0:y1, x0:x1] = arr[y0 + oy : y1 + oy, x0 + ox : x1 + ox]
    return out


def _zero_border(arr: np.ndarray, width: int) -> None:
    if width <= 0:
        return
    arr[:width, :] = 0
    arr[-width:, :] = 0
    arr[:, :width] = 0
    arr[:, -width:] = 0


def compute_gradient(img: np.ndarray, direction: int, distance: int) -> GradientField:
    """First-order directional difference I(P) - I(P + distance * step)."""
    if direction not in DIRECTIONS:
        raise InvalidParameterError(f"direction must be one of {DIRECTIONS}, got {direction}")
    h, w = img.shape
    if not 1 <= distance <= (min(h, w) - 1) // 2:
        raise DistanceTooLargeError(
            f"distance {distance} out of range for {w}x{h} image"
        )
    dx, dy = _STEPS[direction]
    values = img - _shifted(img, dx * distance, dy * distance)
    _zero_border(values, distance)
    return GradientField(direction, distance, values, distance)


def _pattern_codes(ga: np.ndarray, gb: np.ndarray, distance: int) -> np.ndarray:
    bit = ga > gb
    codes = bit.astype(np.uint16) << 8  # center comparison is the MSB
    for k, (ux, uy) in enumerate(_RING):
        codes |= _shifted(bit, ux * distance, uy * distance).astype(np.uint16) << (7 - k)
    _zero_border(codes, 2 * distance)
    return codes


def compute_pattern_map(
    img: np.ndarray, pair: tuple[int, int], distance: int
) -> PatternCodeMap:
    """Encode the pairwise gradient comparison into a 9-bit code map."""
    if tuple(pair) not in DIRECTION_PAIRS:
        raise InvalidParameterError(f"invalid direction pair: {pair}")
    h, w = img.shape
    if min(h, w) < 4 * distance + 1:
        raise DistanceTooLargeError(
            f"distance {distance} leaves no computable pixel in a {w}x{h} image"
        )
    ga = compute_gradient(img, pair[0], distance).values
    gb = compute_gradient(img, pair[1], distance).values
    return PatternCodeMap(tuple(pair), distance, _pattern_codes(ga, gb, distance), 2 * distance)


def compute_lghp_maps(img: np.ndarray, params: LghpParams) -> list[PatternCodeMap]:
    """All 6 * radius_limit code maps, distance-major then pair order.

    Gradients are shared across the six pairs of one distance; each map is
    bit-identical to compute_pattern_map for its (pair, distance).
    """
    h, w = img.shape
    maps = []
    for distance in range(1, params.radius_limit + 1):
        if min(h, w) < 4 * distance + 1:
            raise DistanceTooLargeError(
                f"distance {distance} leaves no computable pixel in a {w}x{h} image"
            )
        grads = {a: compute_gradient(img, a, distance).values for a in DIRECTIONS}
        for pair in DIRECTION_PAIRS:
            codes = _pattern_codes(grads[pair[0]], grads[pair[1]], distance)
            maps.append(PatternCodeMap(pair, distance, codes, 2 * distance))
    return maps


def render_feature_image(code_map: PatternCodeMap) -> np.ndarray:
    """Rescale codes from [0, 511] to a [0, 255] grayscale raster."""
    return code_map.codes.astype(np.float64) * (255.0 / 511.0)


def compute_lbp_baseline(img: np.ndarray) -> PatternCodeMap:
    """Plain 8-neighbor radius-1 LBP used as a sanity comparator.

    Bit for ring neighbor k is 1 iff that neighbor >= center, packed in the
    same neighbor order as the gradient codes; the center bit stays 0 so
    codes fit in [0, 255].
    """
    h, w = img.shape
    if min(h, w) < 3:
        raise DistanceTooLargeError("LBP needs at least a 3x3 image")
    codes = np.zeros(img.shape, dtype=np.uint16)
    for k, (ux, uy) in enumerate(_RING):
        codes |= (_shifted(img, ux, uy) >= img).astype(np.uint16) << (7 - k)
    _zero_border(codes, 1)
    return PatternCodeMap(None, 1, codes, 1)
