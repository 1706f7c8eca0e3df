"""Seeded synthetic face-like corpus for smoke checks and benchmarks.

Each class gets a fixed multi-scale texture with an oval shading structure;
renderings of a class differ by global gain, a linear illumination ramp and
pixel noise. Everything is driven by explicit seeds, so a corpus is a pure
function of its arguments.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from .dataset_io import write_pgm


def _smooth_field(rng: np.random.Generator, side: int, sigma: float) -> np.ndarray:
    field = gaussian_filter(rng.standard_normal((side, side)), sigma, mode="reflect")
    std = field.std()
    return field / std if std > 0 else field


def class_texture(class_id: int, side: int = 64, seed: int = 7) -> np.ndarray:
    """Base image of one identity, values in [0, 255]."""
    rng = np.random.default_rng((seed, class_id))
    tex = (
        1.0 * _smooth_field(rng, side, 6.0)
        + 0.7 * _smooth_field(rng, side, 2.5)
        + 0.4 * _smooth_field(rng, side, 1.0)
    )
    yy, xx = np.mgrid[0:side, 0:side].astype(np.float64)
    cx = side / 2 + rng.uniform(-side / 12, side / 12)
    cy = side / 2 + rng.uniform(-side / 12, side / 12)
    ax = side * rng.uniform(0.28, 0.38)
    ay = side * rng.uniform(0.34, 0.46)
    oval = np.exp(-(((xx - cx) / ax) ** 2 + ((yy - cy) / ay) ** 2))
    base = 0.75 * tex / np.abs(tex).max() + 1.1 * oval - 0.55
    lo, hi = base.min(), base.max()
    return 25.0 + (base - lo) * (205.0 / (hi - lo))


def render(
    base: np.ndarray, class_id: int, image_id: int, seed: int = 7,
    noise_sigma: float = 8.0,
) -> np.ndarray:
    """One illumination-jittered rendering of a class texture."""
    side = base.shape[0]
    rng = np.random.default_rng((seed, class_id, 1000 + image_id))
    gain = rng.uniform(0.7, 1.3)
    yy, xx = np.mgrid[0:side, 0:side].astype(np.float64)
    gx = rng.uniform(-0.7, 0.7)
    gy = rng.uniform(-0.7, 0.7)
    ramp = gx * (xx - side / 2) + gy * (yy - side / 2)
    img = base * gain + ramp + rng.normal(0.0, noise_sigma, base.shape)
    return np.clip(img, 0.0, 255.0)


def synthetic_corpus(
    classes: int = 10, per_class: int = 8, side: int = 64, seed: int = 7,
    noise_sigma: float = 8.0,
) -> tuple[list[np.ndarray], np.ndarray]:
    """Images and labels of a full corpus, class-major order."""
    images = []
    labels = []
    for cls in range(classes):
        base = class_texture(cls, side, seed)
        for i in range(per_class):
            images.append(render(base, cls, i, seed, noise_sigma))
            labels.append(cls)
    return images, np.array(labels, dtype=np.int64)


def write_corpus(
    root: str | Path, classes: int = 10, per_class: int = 8, side: int = 64,
    seed: int = 7, noise_sigma: float = 8.0,
) -> Path:
    """Materialize a corpus as root/class_XX/face_XX.pgm and return root."""
    rootp = Path(root)
    images, labels = synthetic_corpus(classes, per_class, side, seed, noise_sigma)
    for i, (img, label) in enumerate(zip(images, labels)):
        cls_dir = rootp / f"class_{label:02d}"
        cls_dir.mkdir(parents=True, exist_ok=True)
        write_pgm(cls_dir / f"face_{i % per_class:02d}.pgm", img)
    return rootp
