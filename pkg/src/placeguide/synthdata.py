"""Deterministic synthetic imagery for demos, fixtures, and evaluation.

Real reference photography for the cataloged places is not distributable
with the repo, so fixtures use generated stand-ins: each label gets a flat
base color with a contrasting band plus per-pixel noise. The three default
palettes are exact channel rotations of one another, which keeps the
classes equally far from channel-symmetric imagery (uniform noise, gray
cards) — such images score near 1/3 per label and are rejected by the
confidence floor instead of collapsing onto one class.

Color components sit at least the noise amplitude away from the descriptor's
histogram bin edges (multiples of 32), so per-pixel noise never moves mass
across bins and within-class descriptors stay tightly clustered.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from .errors import InvalidArgumentError

DEFAULT_LABELS = ("Kaaba", "Zamzam", "Maqam Ibrahim")
DEFAULT_IMAGE_SIZE = 64
DEFAULT_NOISE = 10

_BASE_COLOR = (205, 75, 75)
_BAND_COLOR = (45, 140, 235)


def _rotate_channels(color: tuple[int, int, int], turns: int) -> tuple[int, int, int]:
    r, g, b = color
    for _ in range(turns % 3):
        r, g, b = b, r, g
    return (r, g, b)


def class_image(
    rng: np.random.Generator,
    class_index: int,
    size: int = DEFAULT_IMAGE_SIZE,
    noise: int = DEFAULT_NOISE,
) -> np.ndarray:
    """One synthetic sample of the given class as an HxWx3 uint8 array."""
    if size < 4:
        raise InvalidArgumentError("size must be >= 4")
    img = np.empty((size, size, 3), dtype=np.int64)
    img[:, :] = _rotate_channels(_BASE_COLOR, class_index)
    img[size // 4 : size // 2, :] = _rotate_channels(_BAND_COLOR, class_index)
    img += rng.integers(-noise, noise + 1, size=img.shape)
    return np.clip(img, 0, 255).astype(np.uint8)


def noise_image(rng: np.random.Generator, size: int = DEFAULT_IMAGE_SIZE) -> np.ndarray:
    """An image matching none of the classes: i.i.d. uniform pixels."""
    return rng.integers(0, 256, size=(size, size, 3)).astype(np.uint8)


def write_png(array: np.ndarray, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(array, mode="RGB").save(path, format="PNG")


def generate_dataset(
    root: str | Path,
    per_label: int,
    seed: int = 7,
    labels: Sequence[str] = DEFAULT_LABELS,
    size: int = DEFAULT_IMAGE_SIZE,
) -> list[Path]:
    """Write ``per_label`` PNGs per label under ``root/<label>/``.

    Fully deterministic for a given seed; returns the written paths.
    """
    if per_label < 1:
        raise InvalidArgumentError("per_label must be >= 1")
    root = Path(root)
    rng = np.random.default_rng(seed)
    written: list[Path] = []
    for class_index, label in enumerate(labels):
        for n in range(per_label):
            path = root / label / f"{n:04d}.png"
            write_png(class_image(rng, class_index, size=size), path)
            written.append(path)
    return written
