"""Procedural rasters: small test images with known segment structure and
frame sequences with ground-truth object motion for the tracker.

The three named test images are committed under assets/images/ and must be
reproducible bit-for-bit from these generators (guard-tested), so any edit
here is a deliberate asset change.
"""

from __future__ import annotations

import numpy as np

from .segment import Image


def block_image(colors, block_width: int, height: int) -> Image:
    """Horizontal strip of solid color blocks, one per entry of colors."""
    colors = np.asarray(colors, dtype=np.uint8)
    out = np.zeros((height, block_width * len(colors), 3), dtype=np.uint8)
    for i, c in enumerate(colors):
        out[:, i * block_width:(i + 1) * block_width] = c
    return Image(out)


def _noise(rng, shape, sigma):
    return rng.normal(0.0, sigma, size=shape)


def _finish(base) -> Image:
    return Image(np.clip(np.floor(base + 0.5), 0, 255).astype(np.uint8))


def make_shore(width: int = 150, height: int = 125, seed: int = 0) -> Image:
    """Sky / sea / sand horizontal bands with soft gradients."""
    rng = np.random.default_rng(seed)
    base = np.zeros((height, width, 3))
    rows = np.arange(height)[:, None, None]
    sky, sea = int(height * 0.4), int(height * 0.72)
    base[:sky] = (135, 180, 235)
    base[:sky] += (rows[:sky] / max(sky, 1)) * np.array([12.0, 8.0, -10.0])
    base[sky:sea] = (30, 90, 150)
    base[sky:sea] += ((rows[sky:sea] - sky) / max(sea - sky, 1)) \
        * np.array([6.0, 10.0, 8.0])
    base[sea:] = (210, 180, 120)
    base[sea:] += ((rows[sea:] - sea) / max(height - sea, 1)) \
        * np.array([-8.0, -6.0, -4.0])
    base += _noise(rng, base.shape, 2.5)
    return _finish(base)


def make_meadow(width: int = 140, height: int = 110, seed: int = 1) -> Image:
    """Green field under a pale sky with a warm sun disc."""
    rng = np.random.default_rng(seed)
    base = np.zeros((height, width, 3))
    horizon = int(height * 0.45)
    rows = np.arange(height)[:, None, None]
    base[:horizon] = (190, 205, 230)
    base[:horizon] += (rows[:horizon] / max(horizon, 1)) * np.array([8.0, 5.0, 0.0])
    base[horizon:] = (70, 150, 60)
    base[horizon:] += ((rows[horizon:] - horizon) / max(height - horizon, 1)) \
        * np.array([-10.0, -14.0, -6.0])
    yy, xx = np.mgrid[0:height, 0:width]
    sun = (xx - width * 0.75) ** 2 + (yy - height * 0.2) ** 2 \
        <= (height * 0.12) ** 2
    base[sun] = (250, 215, 90)
    base += _noise(rng, base.shape, 2.5)
    return _finish(base)


def make_patchwork(width: int = 144, height: int = 120, seed: int = 2) -> Image:
    """2x3 quilt of distinct mid-saturation patches."""
    rng = np.random.default_rng(seed)
    palette = np.array([
        (180, 60, 60), (60, 140, 80), (70, 80, 180),
        (200, 170, 70), (120, 70, 150), (70, 160, 170),
    ], dtype=np.float64)
    base = np.zeros((height, width, 3))
    bw, bh = width // 3, height // 2
    for i in range(2):
        for j in range(3):
            y0, x0 = i * bh, j * bw
            base[y0:y0 + bh, x0:x0 + bw] = palette[i * 3 + j]
    base += _noise(rng, base.shape, 3.0)
    return _finish(base)


TEST_IMAGES = {
    "shore": make_shore,
    "meadow": make_meadow,
    "patchwork": make_patchwork,
}


# -------------------------------------------------------- tracking scenes

BACKGROUND = np.array([40, 40, 40], dtype=np.uint8)
OBJECT_COLOR = np.array([200, 60, 60], dtype=np.uint8)


def _scene(width, height, center, size, color) -> Image:
    frame = np.tile(BACKGROUND, (height, width, 1))
    if center is not None:
        half = size // 2
        x0 = int(round(center[0])) - half
        y0 = int(round(center[1])) - half
        frame[y0:y0 + size, x0:x0 + size] = color
    return Image(frame)


def moving_square_frames(n_frames: int = 12, width: int = 120,
                         height: int = 90, size: int = 15,
                         start=(22.0, 45.0), velocity=(3.0, 0.0)):
    """Solid square translating at constant velocity; returns ground truth.

    The square's side is odd so its pixel-mean center is exact.
    """
    frames, centers = [], []
    for t in range(n_frames):
        cx = start[0] + velocity[0] * t
        cy = start[1] + velocity[1] * t
        frames.append(_scene(width, height, (cx, cy), size, OBJECT_COLOR))
        half = size // 2
        centers.append((round(cx) - half + (size - 1) / 2.0,
                        round(cy) - half + (size - 1) / 2.0))
    return frames, centers


def removal_frames(n_present: int = 4, n_absent: int = 3, width: int = 120,
                   height: int = 90, size: int = 15, center=(60.0, 45.0)):
    """Static object that vanishes after n_present frames."""
    frames = []
    for t in range(n_present + n_absent):
        pos = center if t < n_present else None
        frames.append(_scene(width, height, pos, size, OBJECT_COLOR))
    return frames, n_present


def drift_frames(n_frames: int = 20, width: int = 120, height: int = 90,
                 size: int = 15, center=(60.0, 45.0),
                 start_red=196.0, end_red=124.0, ramp: float = 12.0):
    """Static object whose red channel drifts between two levels.

    The square carries a fixed left-to-right red ramp of +-ramp around the
    frame's base level, the way a shaded real object straddles color cells:
    as the base level drifts, the set of occupied cells migrates one cell
    at a time instead of teleporting.
    """
    frames, base_levels = [], []
    column_ramp = np.linspace(-ramp, ramp, size)
    for t in range(n_frames):
        frac = t / (n_frames - 1) if n_frames > 1 else 0.0
        base = start_red + (end_red - start_red) * frac
        frame = np.tile(BACKGROUND, (height, width, 1))
        half = size // 2
        x0 = int(round(center[0])) - half
        y0 = int(round(center[1])) - half
        red = np.clip(np.floor(base + column_ramp + 0.5), 0, 255)
        frame[y0:y0 + size, x0:x0 + size, 0] = red[None, :].astype(np.uint8)
        frame[y0:y0 + size, x0:x0 + size, 1] = 60
        frame[y0:y0 + size, x0:x0 + size, 2] = 60
        frames.append(Image(frame))
        base_levels.append(base)
    return frames, base_levels
