"""Image loading, corpus scanning, noise injection and PGM output.

Images are plain 2-D float64 arrays with intensities in [0, 255]. Color
inputs are reduced by ITU-R 601 luminance and everything is resized to a
square side with bilinear interpolation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    DecodeError,
    EmptyDatasetError,
    NegativeVarianceError,
    UnsupportedFormatError,
)

log = logging.getLogger(__name__)

SUPPORTED_EXTENSIONS = (".png", ".jpg", ".jpeg", ".pgm", ".bmp")

# ITU-R 601 luminance weights for R, G, B
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class ManifestEntry:
    image_id: int
    path: str  # relative to the manifest root, posix separators
    label: int


@dataclass(frozen=True)
class DatasetManifest:
    """Deterministic listing of a class-per-directory corpus.

    Labels index sorted non-empty class directory names; image ids are dense
    and follow lexicographic path order.
    """

    root: Path
    entries: tuple[ManifestEntry, ...]
    class_names: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def full_path(self, entry: ManifestEntry) -> Path:
        return self.root / entry.path


def resize_bilinear(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resample with half-pixel centers and clamp-to-edge sampling."""
    in_h, in_w = img.shape
    if (in_h, in_w) == (out_h, out_w):
        return img.astype(np.float64, copy=True)
    ys = (np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5
    xs = (np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5
    y0f = np.floor(ys)
    x0f = np.floor(xs)
    ty = ys - y0f
    tx = xs - x0f
    y0 = np.clip(y0f.astype(int), 0, in_h - 1)
    y1 = np.clip(y0f.astype(int) + 1, 0, in_h - 1)
    x0 = np.clip(x0f.astype(int), 0, in_w - 1)
    x1 = np.clip(x0f.astype(int) + 1, 0, in_w - 1)
    top = img[np.ix_(y0, x0)] * (1 - tx) + img[np.ix_(y0, x1)] * tx
    bot = img[np.ix_(y1, x0)] * (1 - tx) + img[np.ix_(y1, x1)] * tx
    return top * (1 - ty)[:, None] + bot * ty[:, None]


def load_image(path: str | Path, side: int = 64) -> np.ndarray:
    """Decode, grayscale and resize one image file to side x side.

    Raises FileNotFoundError, UnsupportedFormatError or DecodeError, each
    naming the offending path.
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"no such image file: {p}")
    if p.suffix.lower() not in SUPPORTED_EXTENSIONS:
        raise UnsupportedFormatError(f"unsupported image format: {p}")
    try:
        with Image.open(p) as im:
            im.load()
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.float64)
            elif im.mode in ("I", "I;16", "I;16B", "I;16L"):
                arr = np.asarray(im, dtype=np.float64)
                if arr.size and arr.max() > 255:
                    arr = arr * (255.0 / 65535.0)
            else:
                rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
                arr = rgb @ _LUMA
    except UnidentifiedImageError as exc:
        raise DecodeError(f"cannot decode image: {p}") from exc
    except OSError as exc:
        raise DecodeError(f"cannot decode image: {p} ({exc})") from exc
    return resize_bilinear(arr, side, side)


def scan_dataset(root: str | Path) -> DatasetManifest:
    """Enumerate root/<class_name>/<image_file> into a labeled manifest.

    Non-empty class directories are sorted by name and labeled 0..k-1;
    entries are sorted by relative path. Empty class directories are skipped
    with a warning.
    """
    rootp = Path(root)
    if not rootp.is_dir():
        raise NotADirectoryError(f"dataset root is not a directory: {rootp}")
    classes = []
    for sub in sorted(rootp.iterdir(), key=lambda p: p.name):
        if not sub.is_dir():
            continue
        files = sorted(
            f.name for f in sub.iterdir()
            if f.is_file() and f.suffix.lower() in SUPPORTED_EXTENSIONS
        )
        if not files:
            log.warning("skipping empty class directory: %s", sub)
            continue
        classes.append((sub.name, files))
    if not classes:
        raise EmptyDatasetError(f"no image files under {rootp}")
    entries = []
    for label, (name, files) in enumerate(classes):
        for fname in files:
            entries.append((f"{name}/{fname}", label))
    entries.sort(key=lambda e: e[0])
    manifest = tuple(
        ManifestEntry(image_id=i, path=rel, label=lab)
        for i, (rel, lab) in enumerate(entries)
    )
    return DatasetManifest(
        root=rootp,
        entries=manifest,
        class_names=tuple(name for name, _ in classes),
    )


def awgn_noise(shape: tuple[int, ...], variance: float, seed: int) -> np.ndarray:
    """Pre-clamp Gaussian noise field on the normalized [0, 1] scale.

    Draws are row-major from numpy's default generator so the same
    (shape, variance, seed) always yields the same field.
    """
    if variance < 0:
        raise NegativeVarianceError(f"variance must be >= 0, got {variance}")
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, math.sqrt(variance), shape)


def add_awgn(img: np.ndarray, variance: float, seed: int) -> np.ndarray:
    """Add white Gaussian noise of the given variance on the [0, 1] scale.

    The image is normalized, perturbed, clamped back to [0, 1] and rescaled
    to [0, 255]. Zero variance returns the input unchanged.
    """
    if variance < 0:
        raise NegativeVarianceError(f"variance must be >= 0, got {variance}")
    if variance == 0:
        return img.astype(np.float64, copy=True)
    noise = awgn_noise(img.shape, variance, seed)
    return np.clip(img / 255.0 + noise, 0.0, 1.0) * 255.0


def write_pgm(path: str | Path, img: np.ndarray) -> None:
    """Write a [0, 255] float image as a binary 8-bit PGM."""
    data = np.rint(np.clip(img, 0, 255)).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())
