"""Tracker tests on synthetic scenes with known ground truth."""

import numpy as np
import pytest

from gridshift.modeseek import ShiftConfig
from gridshift.segment import Image
from gridshift.synthetic import (
    BACKGROUND,
    OBJECT_COLOR,
    drift_frames,
    moving_square_frames,
    removal_frames,
)
from gridshift.track import (
    BinSet,
    TrackState,
    Window,
    annotate,
    cluster_window,
    init_tracker,
    neighborhood,
    track_frame,
    track_sequence,
)

CFG = ShiftConfig(h=32.0)


def object_label(frame, win, cfg=CFG):
    """Cluster id of the pixel at the window center (the tracked object)."""
    labeling, _ = cluster_window(frame, win, cfg)
    x0, y0, x1, _ = win.rect(frame.width, frame.height)
    cx, cy = int(win.cx) - x0, int(win.cy) - y0
    return int(labeling.labels[cy * (x1 - x0) + cx])


def solid_scene():
    """Red 15x15 square centered at (60, 45) in a 120x90 gray frame."""
    frames, _ = moving_square_frames(n_frames=1, start=(60.0, 45.0),
                                     velocity=(0.0, 0.0))
    return frames[0]


def test_window_rect_and_clamping():
    win = Window(cx=10.0, cy=8.0, w=20, h_px=16)
    assert win.rect(120, 90) == (0, 0, 20, 16)
    win = Window(cx=118.0, cy=88.0, w=20, h_px=16)
    assert win.rect(120, 90) == (100, 74, 120, 90)
    with pytest.raises(ValueError):
        Window(cx=0, cy=0, w=0, h_px=4)


def test_binset_must_be_nonempty():
    with pytest.raises(ValueError):
        BinSet(bins=frozenset(), h=32.0)


def test_init_single_color_object():
    frame = solid_scene()
    win = Window(cx=60.0, cy=45.0, w=11, h_px=11)  # strictly inside square
    state = init_tracker(frame, win, CFG, [0])
    want = tuple(int(v // 32) for v in OBJECT_COLOR)
    assert state.bins.bins == {want}
    assert not state.lost
    assert state.last_match_count == 121


def test_init_two_clusters_union():
    frame = solid_scene()
    # window straddles the square's right edge: object + background
    win = Window(cx=68.0, cy=45.0, w=20, h_px=12)
    labeling, _ = cluster_window(frame, win, CFG)
    assert labeling.k == 2
    state = init_tracker(frame, win, CFG, [0, 1])
    obj = tuple(int(v // 32) for v in OBJECT_COLOR)
    bg = tuple(int(v // 32) for v in BACKGROUND)
    assert state.bins.bins == {obj, bg}


def test_init_bins_match_linear_scan():
    rng = np.random.default_rng(14)
    px = rng.integers(0, 256, size=(40, 40, 3), dtype=np.uint8)
    frame = Image(px)
    win = Window(cx=20.0, cy=20.0, w=16, h_px=16)
    labeling, colors = cluster_window(frame, win, CFG)
    state = init_tracker(frame, win, CFG, [0])
    member_colors = colors[labeling.labels == 0]
    want = {tuple(int(np.floor(v / 32.0)) for v in c) for c in member_colors}
    assert state.bins.bins == want


def test_init_rejects_bad_selections():
    frame = solid_scene()
    win = Window(cx=60.0, cy=45.0, w=11, h_px=11)
    with pytest.raises(ValueError, match="at least one"):
        init_tracker(frame, win, CFG, [])
    with pytest.raises(ValueError, match="out of range"):
        init_tracker(frame, win, CFG, [5])
    with pytest.raises(ValueError, match="inside the frame"):
        init_tracker(frame, Window(cx=2.0, cy=2.0, w=11, h_px=11), CFG, [0])


def test_static_object_center_stays_put():
    frame = solid_scene()
    win = Window(cx=60.0, cy=45.0, w=25, h_px=25)
    state = init_tracker(frame, win, CFG, [object_label(frame, win)])
    after = track_frame(state, frame, CFG)
    assert after.window.cx == pytest.approx(60.0)
    assert after.window.cy == pytest.approx(45.0)
    assert not after.lost
    assert after.last_match_count == 225  # whole square matches


def test_moving_square_recovered_within_half_pixel():
    frames, centers = moving_square_frames(n_frames=10)
    win = Window(cx=centers[0][0], cy=centers[0][1], w=31, h_px=31)
    rows = track_sequence(frames, win, CFG, [object_label(frames[0], win)])
    assert not any(r.lost for r in rows)
    for row, (cx, cy) in zip(rows[1:], centers[1:]):
        assert abs(row.window.cx - cx) <= 0.5, (row.window.cx, cx)
        assert abs(row.window.cy - cy) <= 0.5


def test_tracked_center_is_mean_of_matches():
    frames, centers = moving_square_frames(n_frames=3)
    win = Window(cx=centers[0][0], cy=centers[0][1], w=31, h_px=31)
    state = init_tracker(frames[0], win, CFG, [object_label(frames[0], win)])
    after = track_frame(state, frames[1], CFG)
    # full-scan oracle over the settled window
    x0, y0, x1, y1 = after.window.rect(frames[1].width, frames[1].height)
    patch = frames[1].pixels[y0:y1, x0:x1]
    obj_bin = tuple(int(v // 32) for v in OBJECT_COLOR)
    match = np.all(patch // 32 == obj_bin, axis=2)
    ys, xs = np.nonzero(match)
    assert after.window.cx == pytest.approx((xs + x0).mean())
    assert after.window.cy == pytest.approx((ys + y0).mean())


def test_removed_object_flags_lost_and_freezes():
    frames, n_present = removal_frames(n_present=4, n_absent=3)
    win = Window(cx=60.0, cy=45.0, w=25, h_px=25)
    rows = track_sequence(frames, win, CFG, [object_label(frames[0], win)])
    for row in rows[:n_present]:
        assert not row.lost
    for row in rows[n_present:]:
        assert row.lost
        assert row.window == rows[n_present - 1].window
        assert row.last_match_count == 0


def test_track_frame_rejects_lost_state():
    frame = solid_scene()
    win = Window(cx=60.0, cy=45.0, w=25, h_px=25)
    state = init_tracker(frame, win, CFG, [object_label(frame, win)])
    lost = TrackState(window=state.window, bins=state.bins,
                      frame_w=frame.width, frame_h=frame.height, lost=True)
    with pytest.raises(ValueError, match="lost"):
        track_frame(lost, frame, CFG)


def test_color_drift_needs_bin_updates():
    frames, _ = drift_frames(n_frames=20)
    win = Window(cx=60.0, cy=45.0, w=25, h_px=25)
    obj = object_label(frames[0], win)
    with_updates = track_sequence(frames, win, CFG, [obj], update_bins=True)
    assert not any(r.lost for r in with_updates)
    frozen_bins = track_sequence(frames, win, CFG, [obj], update_bins=False)
    assert any(r.lost for r in frozen_bins)


def test_bin_updates_stay_local():
    frames, _ = drift_frames(n_frames=20)
    win = Window(cx=60.0, cy=45.0, w=25, h_px=25)
    state = init_tracker(frames[0], win, CFG, [object_label(frames[0], win)])
    for frame in frames[1:]:
        before = state.bins
        state = track_frame(state, frame, CFG, update_bins=True)
        assert state.bins.bins <= neighborhood(before)
        if state.lost:
            break
    assert not state.lost


def test_neighborhood_contains_origin_and_adjacent():
    b = BinSet(bins=frozenset({(2, 2, 2)}), h=32.0)
    n = neighborhood(b)
    assert (2, 2, 2) in n
    assert (1, 2, 3) in n
    assert (4, 2, 2) not in n
    assert len(n) == 27


def test_frame_size_mismatch_rejected():
    frame = solid_scene()
    win = Window(cx=60.0, cy=45.0, w=25, h_px=25)
    state = init_tracker(frame, win, CFG, [object_label(frame, win)])
    small = Image(np.tile(BACKGROUND, (40, 40, 1)))
    with pytest.raises(ValueError, match="frame size"):
        track_frame(state, small, CFG)


def test_annotate_draws_border():
    frame = solid_scene()
    win = Window(cx=60.0, cy=45.0, w=25, h_px=25)
    out = annotate(frame, win, color=(255, 255, 0))
    x0, y0, x1, y1 = win.rect(frame.width, frame.height)
    assert np.all(out.pixels[y0, x0:x1] == (255, 255, 0))
    assert np.all(out.pixels[y0:y1, x1 - 1] == (255, 255, 0))
    # original untouched
    assert not np.all(frame.pixels[y0, x0:x1] == (255, 255, 0))
