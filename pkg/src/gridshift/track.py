"""Window tracking on color grid cells.

Setup: cluster the colors inside a user-chosen window of frame 0, let the
user pick the cluster(s) that make up the object, and collect the color
cells (side h) those member pixels occupy into a bin set B.  Per frame the
window re-centers on the mean (x, y) of pixels whose color cell is in B,
iterating until the center settles.  An empty match set means the object
left: the tracker freezes the window and raises the lost flag rather than
wandering.  Optionally B is refreshed each frame from the settled window's
pixels, restricted to cells adjacent to the old B, which lets the tracker
follow gradual color drift without ever teleporting to a new palette.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .grid import PointSet, _offsets, bin_points
from .modeseek import Labeling, ShiftConfig, meanshiftpp
from .segment import Image

# sub-pixel precision is meaningless for a mean of integer pixel centers
WINDOW_TOL = 0.5
WINDOW_MAX_ITERS = 30


@dataclass(frozen=True)
class Window:
    """Axis-aligned box given by real center and integer pixel extents."""

    cx: float
    cy: float
    w: int
    h_px: int

    def __post_init__(self):
        if self.w < 1 or self.h_px < 1:
            raise ValueError(f"window extents must be positive, got {self.w}x{self.h_px}")

    def rect(self, frame_w: int, frame_h: int):
        """Integer (x0, y0, x1, y1) of the window clipped to the frame."""
        x0 = int(math.floor(self.cx - self.w / 2.0 + 0.5))
        y0 = int(math.floor(self.cy - self.h_px / 2.0 + 0.5))
        x0 = min(max(x0, 0), max(frame_w - self.w, 0))
        y0 = min(max(y0, 0), max(frame_h - self.h_px, 0))
        return x0, y0, min(x0 + self.w, frame_w), min(y0 + self.h_px, frame_h)


@dataclass(frozen=True)
class BinSet:
    """Occupied color cells of the tracked object."""

    bins: frozenset
    h: float

    def __post_init__(self):
        if not self.bins:
            raise ValueError("bin set cannot be empty")


@dataclass(frozen=True)
class TrackState:
    window: Window
    bins: BinSet
    frame_w: int
    frame_h: int
    lost: bool = False
    last_match_count: int = 0


def _clamp_center(cx, cy, w, h_px, frame_w, frame_h):
    cx = min(max(cx, w / 2.0), frame_w - w / 2.0)
    cy = min(max(cy, h_px / 2.0), frame_h - h_px / 2.0)
    return cx, cy


def _window_pixels(frame: Image, win: Window):
    """Colors and (x, y) positions of the pixels under the window."""
    x0, y0, x1, y1 = win.rect(frame.width, frame.height)
    patch = frame.pixels[y0:y1, x0:x1].reshape(-1, 3).astype(np.float64)
    ys, xs = np.divmod(np.arange(patch.shape[0]), x1 - x0)
    return patch, xs + x0, ys + y0


def _color_bins(colors: np.ndarray, h: float) -> np.ndarray:
    return bin_points(colors, h)


def _codes(bins: np.ndarray) -> np.ndarray:
    # colors live in [0, 255], so bin indices stay well under 2^20
    return (bins[:, 0] * 2**20 + bins[:, 1]) * 2**20 + bins[:, 2]


def _binset_codes(binset: BinSet) -> np.ndarray:
    arr = np.asarray(sorted(binset.bins), dtype=np.int64)
    return _codes(arr)


def cluster_window(frame: Image, window: Window,
                   cfg: ShiftConfig) -> tuple[Labeling, np.ndarray]:
    """Cluster the window's pixel colors; also return those colors."""
    colors, _, _ = _window_pixels(frame, window)
    labeling, _ = meanshiftpp(PointSet(colors), cfg)
    return labeling, colors


def init_tracker(frame0: Image, window0: Window, cfg: ShiftConfig,
                 selected_clusters) -> TrackState:
    """Build the bin set from the chosen clusters of the initial window.

    B is the set of color cells occupied by the member pixels of the
    selected clusters.
    """
    x0 = math.floor(window0.cx - window0.w / 2.0 + 0.5)
    y0 = math.floor(window0.cy - window0.h_px / 2.0 + 0.5)
    if x0 < 0 or y0 < 0 or x0 + window0.w > frame0.width \
            or y0 + window0.h_px > frame0.height:
        raise ValueError("initial window must lie fully inside the frame")
    selected = sorted({int(c) for c in selected_clusters})
    if not selected:
        raise ValueError("select at least one cluster id")
    labeling, colors = cluster_window(frame0, window0, cfg)
    bad = [c for c in selected if c < 0 or c >= labeling.k]
    if bad:
        raise ValueError(
            f"cluster ids {bad} out of range, window has {labeling.k} clusters")
    member = np.isin(labeling.labels, selected)
    cells = _color_bins(colors[member], cfg.h)
    bins = frozenset(map(tuple, cells.tolist()))
    return TrackState(window=window0, bins=BinSet(bins=bins, h=cfg.h),
                      frame_w=frame0.width, frame_h=frame0.height,
                      lost=False, last_match_count=int(member.sum()))


def neighborhood(binset: BinSet) -> frozenset:
    """N(B): the bins plus every color cell Chebyshev-adjacent to one."""
    out = set()
    for b in binset.bins:
        for v in _offsets(len(b)):
            out.add(tuple(a + o for a, o in zip(b, v)))
    return frozenset(out)


def track_frame(state: TrackState, frame: Image, cfg: ShiftConfig,
                update_bins: bool = False, tol: float = WINDOW_TOL,
                max_iters: int = WINDOW_MAX_ITERS) -> TrackState:
    """Advance the tracker by one frame.

    Re-centers the window on the mean position of bin-matching pixels
    until the center moves less than tol (Euclidean, in pixels).  An
    empty match set at any iterate freezes the window at its incoming
    position and marks the object lost.
    """
    if state.lost:
        raise ValueError("tracker already lost the object")
    if (frame.width, frame.height) != (state.frame_w, state.frame_h):
        raise ValueError(
            f"frame size {frame.width}x{frame.height} does not match the "
            f"tracked sequence ({state.frame_w}x{state.frame_h})")
    win = state.window
    codes_b = _binset_codes(state.bins)
    matches = 0
    for _ in range(max_iters):
        colors, xs, ys = _window_pixels(frame, win)
        hit = np.isin(_codes(_color_bins(colors, cfg.h)), codes_b)
        matches = int(hit.sum())
        if matches == 0:
            return replace(state, window=state.window, lost=True,
                           last_match_count=0)
        cx, cy = float(xs[hit].mean()), float(ys[hit].mean())
        cx, cy = _clamp_center(cx, cy, win.w, win.h_px,
                               frame.width, frame.height)
        moved = math.hypot(cx - win.cx, cy - win.cy)
        win = replace(win, cx=cx, cy=cy)
        if moved < tol:
            break
    bins = state.bins
    if update_bins:
        colors, _, _ = _window_pixels(frame, win)
        seen = frozenset(map(tuple, _color_bins(colors, cfg.h).tolist()))
        refreshed = seen & neighborhood(state.bins)
        if refreshed:  # an empty refresh would kill the tracker; skip it
            bins = BinSet(bins=refreshed, h=state.bins.h)
    return replace(state, window=win, bins=bins, lost=False,
                   last_match_count=matches)


def track_sequence(frames, window0: Window, cfg: ShiftConfig,
                   selected_clusters, update_bins: bool = False):
    """Run the tracker across a frame list; one state row per frame.

    Frame 0 is the initialization frame; its row carries the initial
    window.  Tracking stops updating after the object is lost, but a row
    (flagged lost, window frozen) is still emitted for every frame.
    """
    state = init_tracker(frames[0], window0, cfg, selected_clusters)
    rows = [state]
    for frame in frames[1:]:
        if not state.lost:
            state = track_frame(state, frame, cfg, update_bins=update_bins)
        rows.append(state)
    return rows


def annotate(frame: Image, window: Window,
             color=(255, 255, 0)) -> Image:
    """Copy of the frame with the window outlined (1 px border)."""
    out = frame.pixels.copy()
    x0, y0, x1, y1 = window.rect(frame.width, frame.height)
    c = np.asarray(color, dtype=np.uint8)
    out[y0, x0:x1] = c
    out[y1 - 1, x0:x1] = c
    out[y0:y1, x0] = c
    out[y0:y1, x1 - 1] = c
    return Image(out)
