"""Image segmentation by clustering pixels in color space.

Pixels become rows of a PointSet: plain (r, g, b) in 8-bit channel units,
or (r, g, b, x, y) with the spatial axes rescaled by s = 255/max(w, h) so
a bandwidth in color units also makes sense spatially.  The engine output
maps straight back onto the pixel grid; segments are rendered by replacing
every pixel with its segment's mean color.

File formats: PNG and binary PPM (P6) for images, and a 16-bit PGM (P5,
maxval 65535, big-endian samples) plus a JSON sidecar for label maps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from .grid import PointSet
from .modeseek import ENGINES, Labeling, ShiftConfig

_MODES = ("rgb", "rgbxy")


@dataclass
class Image:
    """8-bit RGB raster, stored (height, width, 3) row-major."""

    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ValueError(
                f"pixels must be (height, width, 3), got {self.pixels.shape}")
        if self.pixels.shape[0] < 1 or self.pixels.shape[1] < 1:
            raise ValueError("image must contain at least one pixel")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass
class SegmentMap:
    """Per-pixel segment ids plus the mean color of each segment."""

    labels: np.ndarray       # (height, width) int64, ids dense in [0, k)
    k: int
    mean_colors: np.ndarray  # (k, 3) float64, average of member pixels

    def __post_init__(self):
        self.labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if self.labels.ndim != 2:
            raise ValueError(f"labels must be 2-d, got shape {self.labels.shape}")
        self.mean_colors = np.asarray(self.mean_colors, dtype=np.float64)
        if self.mean_colors.shape != (self.k, 3):
            raise ValueError(
                f"mean_colors must be ({self.k}, 3), got {self.mean_colors.shape}")

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]


def spatial_scale(img: Image) -> float:
    """Default commensuration factor for the rgbxy feature mode."""
    return 255.0 / max(img.width, img.height)


def image_to_features(img: Image, mode: str = "rgb",
                      scale: float | None = None) -> PointSet:
    """Flatten pixels to feature rows; row i is pixel (i % w, i // w)."""
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")
    rgb = img.pixels.reshape(-1, 3).astype(np.float64)
    if mode == "rgb":
        return PointSet(rgb)
    s = spatial_scale(img) if scale is None else float(scale)
    ys, xs = np.divmod(np.arange(img.height * img.width), img.width)
    return PointSet(np.column_stack([rgb, xs * s, ys * s]))


def segment_image(img: Image, cfg: ShiftConfig, mode: str = "rgb",
                  engine: str = "meanshiftpp",
                  scale: float | None = None):
    """Cluster pixel features and fold the labels back onto the raster.

    Returns (SegmentMap, ShiftTrace), same shape as the engines themselves.
    """
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {sorted(ENGINES)}, got {engine!r}")
    features = image_to_features(img, mode, scale)
    labeling, trace = ENGINES[engine](features, cfg)
    return segment_map_from_labeling(img, labeling), trace


def segment_map_from_labeling(img: Image, labeling: Labeling) -> SegmentMap:
    labels = labeling.labels.reshape(img.height, img.width)
    flat_rgb = img.pixels.reshape(-1, 3).astype(np.float64)
    k = labeling.k
    counts = np.bincount(labeling.labels, minlength=k).astype(np.float64)
    mean_colors = np.column_stack([
        np.bincount(labeling.labels, weights=flat_rgb[:, c], minlength=k) / counts
        for c in range(3)])
    return SegmentMap(labels=labels, k=k, mean_colors=mean_colors)


def recolor(img: Image, seg: SegmentMap) -> Image:
    """Render each pixel as its segment's mean color (rounded half-up)."""
    if (seg.height, seg.width) != (img.height, img.width):
        raise ValueError(
            f"segment map {seg.height}x{seg.width} does not match "
            f"image {img.height}x{img.width}")
    palette = np.clip(np.floor(seg.mean_colors + 0.5), 0, 255).astype(np.uint8)
    return Image(palette[seg.labels])


def downsample(img: Image) -> Image:
    """Factor-of-2 box filter; odd trailing rows/columns average what is there."""
    p = img.pixels.astype(np.float64)
    h, w = p.shape[:2]
    out = np.zeros(((h + 1) // 2, (w + 1) // 2, 3))
    for dy in (0, 1):
        for dx in (0, 1):
            block = p[dy::2, dx::2]
            out[:block.shape[0], :block.shape[1]] += block
    norm = np.ones((h, w))
    cnt = np.zeros(((h + 1) // 2, (w + 1) // 2))
    for dy in (0, 1):
        for dx in (0, 1):
            block = norm[dy::2, dx::2]
            cnt[:block.shape[0], :block.shape[1]] += block
    out /= cnt[:, :, None]
    return Image(np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8))


# ------------------------------------------------------------------ file IO

def load_image(path) -> Image:
    """Read PNG or binary PPM into an RGB raster."""
    with PILImage.open(path) as im:
        return Image(np.asarray(im.convert("RGB")))


def save_image(path, img: Image) -> None:
    path = Path(path)
    pil = PILImage.fromarray(img.pixels, mode="RGB")
    if path.suffix.lower() in (".ppm", ".pnm"):
        pil.save(path, format="PPM")
    else:
        pil.save(path, format="PNG")


def save_labels_pgm16(path, seg: SegmentMap) -> None:
    """Label image as P5 PGM, maxval 65535, big-endian 16-bit samples."""
    if seg.k > 65536:
        raise ValueError(f"{seg.k} segments exceed the 16-bit label range")
    header = f"P5\n{seg.width} {seg.height}\n65535\n".encode("ascii")
    body = seg.labels.astype(">u2").tobytes()
    Path(path).write_bytes(header + body)


def load_labels_pgm16(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    fields = []
    pos = 0
    while len(fields) < 4:  # magic, width, height, maxval
        end = raw.index(b"\n", pos) if b"\n" in raw[pos:] else len(raw)
        fields.extend(raw[pos:end].split())
        pos = end + 1
    magic, w, h, maxval = fields[0], int(fields[1]), int(fields[2]), int(fields[3])
    if magic != b"P5" or maxval != 65535:
        raise ValueError(f"{path}: expected 16-bit P5 PGM")
    data = np.frombuffer(raw[pos:pos + 2 * w * h], dtype=">u2")
    return data.reshape(h, w).astype(np.int64)


def save_segment_map(base_path, seg: SegmentMap, h: float, mode: str) -> None:
    """Write <base>.pgm (labels) and <base>.json (summary) side by side."""
    base = Path(base_path)
    save_labels_pgm16(base.with_suffix(".pgm"), seg)
    summary = {
        "schema": 1,
        "k": seg.k,
        "mean_colors": [[round(float(v), 6) for v in row]
                        for row in seg.mean_colors],
        "h": h,
        "mode": mode,
        "width": seg.width,
        "height": seg.height,
    }
    base.with_suffix(".json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n")
