"""Reference image classifier and confidence-threshold label selection.

The classifier is deliberately simple and fully deterministic: every image
is reduced to a fixed-length color descriptor, labels are scored by
nearest-neighbor distance against a per-label descriptor table, and the
distances are turned into confidences with a softmax. Heavier backends can
replace it behind the same ``classify`` surface; the threshold/selection
pipeline downstream stays unchanged.

Descriptor definition (for an RGB image of height H, width W):

* Grid block: the image is partitioned into a ``grid_size`` x ``grid_size``
  grid with row boundaries ``floor(i * H / grid_size)`` (columns likewise);
  each cell contributes its per-channel mean divided by 255. Cells are
  emitted row-major, channels R, G, B within each cell.
* Histogram block: per channel, an intensity histogram with
  ``histogram_bins`` equal-width bins over [0, 256), normalized by pixel
  count. Channels R, G, B in order, bins ascending within each channel.
* The concatenated vector (grid block then histogram block) is
  L2-normalized. Defaults (grid 4, bins 8) give 4*4*3 + 8*3 = 72 entries.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    DatasetError,
    ImageDecodeError,
    IndexFormatError,
    IndexStateError,
    InvalidArgumentError,
)

INDEX_FORMAT = "reference-index/1"
_DESCRIPTOR_HEADER = "# reference-index descriptors v1"


@dataclass(frozen=True)
class LabelScore:
    """A (label, confidence) pair emitted by a classifier backend."""

    label: str
    confidence: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise InvalidArgumentError(
                f"confidence {self.confidence} outside [0, 1]"
            )

    def to_dict(self) -> dict:
        return {"label": self.label, "confidence": self.confidence}


@dataclass(frozen=True)
class SelectionPolicy:
    """Thresholds for turning raw label scores into a selection.

    ``floor`` drops weak detections outright; ``accept`` is the minimum
    confidence for a label to be offered as a match.
    """

    floor: float = 0.5
    accept: float = 0.8

    def __post_init__(self) -> None:
        if not 0.0 <= self.floor <= self.accept <= 1.0:
            raise InvalidArgumentError(
                f"require 0 <= floor ({self.floor}) <= accept ({self.accept}) <= 1"
            )


@dataclass(frozen=True)
class DescriptorParams:
    """Shape and scoring parameters for the reference descriptor."""

    grid_size: int = 4
    histogram_bins: int = 8
    temperature: float = 0.05

    def __post_init__(self) -> None:
        if self.grid_size < 1:
            raise InvalidArgumentError("grid_size must be >= 1")
        if self.histogram_bins < 1 or 256 % self.histogram_bins != 0:
            raise InvalidArgumentError("histogram_bins must divide 256")
        if not (math.isfinite(self.temperature) and self.temperature > 0.0):
            raise InvalidArgumentError("temperature must be positive")

    @property
    def length(self) -> int:
        return self.grid_size * self.grid_size * 3 + self.histogram_bins * 3

    def to_dict(self) -> dict:
        return {
            "grid_size": self.grid_size,
            "histogram_bins": self.histogram_bins,
            "temperature": self.temperature,
        }


@dataclass(frozen=True)
class ModelManifest:
    """Metadata naming a model, its labels, and descriptor parameters."""

    name: str
    version: str
    labels: tuple[str, ...]
    descriptor_params: DescriptorParams = DescriptorParams()

    def __post_init__(self) -> None:
        if not self.labels:
            raise InvalidArgumentError("manifest needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise InvalidArgumentError("manifest labels must be unique")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "version": self.version,
            "labels": list(self.labels),
            "descriptor_params": self.descriptor_params.to_dict(),
        }


class ReferenceIndex:
    """Per-label descriptor table used for nearest-neighbor classification.

    Immutable after construction; ``classify`` may be called concurrently.
    """

    def __init__(self, manifest: ModelManifest, entries: Mapping[str, np.ndarray]):
        if set(entries) != set(manifest.labels):
            raise InvalidArgumentError(
                "index entries must cover exactly the manifest labels"
            )
        dim = manifest.descriptor_params.length
        for label in manifest.labels:
            table = entries[label]
            if table.ndim != 2 or table.shape[1] != dim:
                raise InvalidArgumentError(
                    f"label {label!r}: descriptors must be (n, {dim}) shaped"
                )
            if table.shape[0] < 1:
                raise InvalidArgumentError(
                    f"label {label!r} has no descriptors"
                )
        self.manifest = manifest
        self.entries: dict[str, np.ndarray] = {
            label: np.array(entries[label], dtype=np.float64, copy=True)
            for label in manifest.labels
        }
        for table in self.entries.values():
            table.setflags(write=False)

    @property
    def descriptor_count(self) -> int:
        return sum(table.shape[0] for table in self.entries.values())


def decode_image(data: bytes) -> np.ndarray:
    """Decode PNG/JPEG bytes to an HxWx3 uint8 RGB array."""
    try:
        with Image.open(io.BytesIO(data)) as img:
            rgb = img.convert("RGB")
            return np.asarray(rgb, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise ImageDecodeError(f"cannot decode image: {exc}") from None


def extract_descriptor(
    image: np.ndarray, params: DescriptorParams = DescriptorParams()
) -> np.ndarray:
    """Compute the color descriptor of a decoded RGB raster.

    ``image`` must be an HxWx3 uint8 array with H and W at least
    ``grid_size``. Deterministic: identical pixels give identical vectors.
    """
    if (
        not isinstance(image, np.ndarray)
        or image.ndim != 3
        or image.shape[2] != 3
        or image.dtype != np.uint8
    ):
        raise InvalidArgumentError("image must be an HxWx3 uint8 RGB array")
    height, width = image.shape[:2]
    grid = params.grid_size
    if height < grid or width < grid:
        raise InvalidArgumentError(
            f"image {width}x{height} smaller than the {grid}x{grid} grid"
        )

    row_edges = [i * height // grid for i in range(grid + 1)]
    col_edges = [j * width // grid for j in range(grid + 1)]
    parts: list[np.ndarray] = []
    pixels = image.astype(np.float64)
    for i in range(grid):
        for j in range(grid):
            cell = pixels[row_edges[i]:row_edges[i + 1], col_edges[j]:col_edges[j + 1]]
            parts.append(cell.reshape(-1, 3).mean(axis=0) / 255.0)

    bins = params.histogram_bins
    bin_width = 256 // bins
    pixel_count = height * width
    for channel in range(3):
        counts = np.bincount(
            image[:, :, channel].reshape(-1) // bin_width, minlength=bins
        )
        parts.append(counts.astype(np.float64) / pixel_count)

    vector = np.concatenate(parts)
    norm = float(np.linalg.norm(vector))
    if norm < 1e-12:
        raise InvalidArgumentError("degenerate image: descriptor is a zero vector")
    return vector / norm


def classify(data: bytes, index: ReferenceIndex) -> tuple[LabelScore, ...]:
    """Score every index label against an encoded image.

    Per label, the distance is the minimum Euclidean distance from the query
    descriptor to that label's table; confidences are
    ``exp(-d/tau) / sum_m exp(-d_m/tau)`` with the manifest temperature, so
    they sum to 1. Sorted by confidence descending, ties by label ascending.
    """
    if not index.entries:
        raise IndexStateError("index has no labels")
    image = decode_image(data)
    query = extract_descriptor(image, index.manifest.descriptor_params)

    distances: dict[str, float] = {}
    for label, table in index.entries.items():
        diffs = table - query
        distances[label] = float(np.sqrt((diffs * diffs).sum(axis=1)).min())

    tau = index.manifest.descriptor_params.temperature
    d_min = min(distances.values())
    weights = {
        label: math.exp(-(d - d_min) / tau) for label, d in distances.items()
    }
    total = sum(weights.values())
    scores = [
        LabelScore(label=label, confidence=weight / total)
        for label, weight in weights.items()
    ]
    scores.sort(key=lambda s: (-s.confidence, s.label))
    return tuple(scores)


@dataclass(frozen=True)
class Selection:
    """Outcome of applying a SelectionPolicy to classifier scores."""

    top: Optional[str]
    ranked: tuple[LabelScore, ...]


def select_place(
    labels: Iterable[LabelScore], policy: SelectionPolicy = SelectionPolicy()
) -> Selection:
    """Apply floor/accept thresholds and rank the surviving labels.

    Entries below ``floor`` are dropped; ``ranked`` holds the remaining
    entries with confidence >= ``accept`` sorted by confidence descending
    (ties by label ascending); ``top`` is the first ranked entry or None.
    The acceptance comparison is inclusive: exactly ``accept`` qualifies.
    """
    kept = [score for score in labels if score.confidence >= policy.floor]
    ranked = sorted(
        (score for score in kept if score.confidence >= policy.accept),
        key=lambda s: (-s.confidence, s.label),
    )
    return Selection(top=ranked[0].label if ranked else None, ranked=tuple(ranked))


def _iter_label_dirs(root: Path) -> list[Path]:
    return sorted(
        (p for p in root.iterdir() if p.is_dir() and not p.name.startswith(".")),
        key=lambda p: p.name,
    )


def _iter_image_files(folder: Path) -> list[Path]:
    return sorted(
        (p for p in folder.iterdir() if p.is_file() and not p.name.startswith(".")),
        key=lambda p: p.name,
    )


def build_index(
    training_root: str | Path,
    params: DescriptorParams = DescriptorParams(),
    name: str = "reference-classifier",
    version: str = "1",
) -> ReferenceIndex:
    """Build a ReferenceIndex from a directory of per-label image folders.

    Every file inside a label folder must decode; an empty label folder or
    an undecodable file is an error naming the offender. Labels are folder
    names, sorted; files are processed in name order so rebuilding from the
    same tree is fully deterministic.
    """
    root = Path(training_root)
    if not root.is_dir():
        raise DatasetError(f"training root is not a directory: {root}")
    label_dirs = _iter_label_dirs(root)
    if not label_dirs:
        raise DatasetError(f"no label folders under {root}")

    entries: dict[str, np.ndarray] = {}
    for folder in label_dirs:
        files = _iter_image_files(folder)
        if not files:
            raise DatasetError(f"label folder {folder.name!r} contains no images")
        vectors = []
        for file in files:
            try:
                image = decode_image(file.read_bytes())
            except ImageDecodeError as exc:
                raise DatasetError(f"cannot decode training image {file}: {exc}") from None
            vectors.append(extract_descriptor(image, params))
        entries[folder.name] = np.vstack(vectors)

    manifest = ModelManifest(
        name=name,
        version=version,
        labels=tuple(d.name for d in label_dirs),
        descriptor_params=params,
    )
    return ReferenceIndex(manifest, entries)


def save_index(index: ReferenceIndex, out_dir: str | Path) -> None:
    """Serialize an index to a directory (manifest.json + descriptors.tsv).

    The descriptor table is text with one row per descriptor
    (``label<TAB>value...``); values use shortest round-trip float syntax,
    so save -> load is lossless and rebuilding from identical inputs yields
    byte-identical files.
    """
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)

    manifest_doc = {"format": INDEX_FORMAT, **index.manifest.to_dict()}
    manifest_text = json.dumps(manifest_doc, indent=2, sort_keys=True) + "\n"
    (directory / "manifest.json").write_text(manifest_text, encoding="utf-8")

    dim = index.manifest.descriptor_params.length
    lines = [f"{_DESCRIPTOR_HEADER} dim={dim} rows={index.descriptor_count}"]
    for label in index.manifest.labels:
        for row in index.entries[label]:
            values = "\t".join(repr(float(v)) for v in row)
            lines.append(f"{label}\t{values}")
    (directory / "descriptors.tsv").write_text(
        "\n".join(lines) + "\n", encoding="utf-8"
    )


def load_index(path: str | Path) -> ReferenceIndex:
    """Load an index directory written by save_index."""
    directory = Path(path)
    manifest_file = directory / "manifest.json"
    descriptor_file = directory / "descriptors.tsv"
    if not manifest_file.is_file() or not descriptor_file.is_file():
        raise IndexFormatError(
            f"{directory} is not an index directory (need manifest.json and descriptors.tsv)"
        )

    try:
        doc = json.loads(manifest_file.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise IndexFormatError(f"{manifest_file}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != INDEX_FORMAT:
        raise IndexFormatError(
            f"{manifest_file}: unsupported format {doc.get('format')!r}"
        )
    try:
        params = DescriptorParams(**doc["descriptor_params"])
        manifest = ModelManifest(
            name=doc["name"],
            version=doc["version"],
            labels=tuple(doc["labels"]),
            descriptor_params=params,
        )
    except (KeyError, TypeError, InvalidArgumentError) as exc:
        raise IndexFormatError(f"{manifest_file}: bad manifest: {exc}") from None

    dim = manifest.descriptor_params.length
    rows: dict[str, list[list[float]]] = {label: [] for label in manifest.labels}
    lines = descriptor_file.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith(_DESCRIPTOR_HEADER):
        raise IndexFormatError(f"{descriptor_file}: missing or unknown header")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        label, values = fields[0], fields[1:]
        if label not in rows:
            raise IndexFormatError(
                f"{descriptor_file}:{lineno}: label {label!r} not in manifest"
            )
        if len(values) != dim:
            raise IndexFormatError(
                f"{descriptor_file}:{lineno}: expected {dim} values, got {len(values)}"
            )
        try:
            rows[label].append([float(v) for v in values])
        except ValueError as exc:
            raise IndexFormatError(f"{descriptor_file}:{lineno}: {exc}") from None

    empty = [label for label, vecs in rows.items() if not vecs]
    if empty:
        raise IndexFormatError(
            f"{descriptor_file}: no descriptors for label(s) {', '.join(sorted(empty))}"
        )
    entries = {
        label: np.array(vecs, dtype=np.float64) for label, vecs in rows.items()
    }
    return ReferenceIndex(manifest, entries)


@dataclass(frozen=True)
class EvaluationReport:
    """Top-1 accuracy plus a true-label x predicted-label count matrix."""

    accuracy: float
    confusion: dict[str, dict[str, int]]
    total: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "total": self.total,
            "confusion": {t: dict(row) for t, row in self.confusion.items()},
        }


def evaluate_index(index: ReferenceIndex, test_root: str | Path) -> EvaluationReport:
    """Evaluate top-1 accuracy over a directory of per-label image folders.

    Test folder names must be labels the index knows; an empty test set is
    an error. Confusion rows are true labels, columns predicted labels.
    """
    root = Path(test_root)
    if not root.is_dir():
        raise DatasetError(f"test root is not a directory: {root}")
    label_dirs = _iter_label_dirs(root)
    unknown = [d.name for d in label_dirs if d.name not in index.entries]
    if unknown:
        raise DatasetError(
            f"test label(s) not in index: {', '.join(sorted(unknown))}"
        )

    labels = list(index.manifest.labels)
    confusion = {t: {p: 0 for p in labels} for t in labels}
    correct = 0
    total = 0
    for folder in label_dirs:
        for file in _iter_image_files(folder):
            try:
                scores = classify(file.read_bytes(), index)
            except ImageDecodeError as exc:
                raise DatasetError(f"cannot decode test image {file}: {exc}") from None
            predicted = scores[0].label
            confusion[folder.name][predicted] += 1
            correct += predicted == folder.name
            total += 1
    if total == 0:
        raise DatasetError(f"test set under {root} contains no images")
    return EvaluationReport(accuracy=correct / total, confusion=confusion, total=total)
