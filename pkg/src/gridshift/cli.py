"""Command-line front end.

Subcommands: cluster, segment, track, bench, sweep, density-check,
generate.  Every subcommand accepts --config pointing at a JSON object
whose keys are flag names (dashes or underscores); explicit flags win
over config values, which win over built-in defaults.

Result payloads are JSON with a top-level "schema": 1, serialized with
sorted keys so identical inputs give byte-identical files.  Wall-clock
timestamps never enter the payload; writing to a file also writes a
<out>.meta.json sidecar carrying the creation time and argv.  Errors exit
with status 1 and a single diagnostic line on stderr.

GRIDSHIFT_THREADS caps the worker pool for segment's directory-batch
mode.  bench and sweep run strictly sequentially regardless, so that no
two timed runs ever share the machine.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .bench import bench_scaling, sweep_bandwidth
from .data import (GaussianMixtureSpec, default_mixture, generate_mixture,
                   load_points_csv, save_points_csv)
from .density import make_target, rate_experiment
from .metrics import adjusted_mutual_information, adjusted_rand_index
from .modeseek import ENGINES, ShiftConfig
from .segment import (Image, downsample, load_image, recolor, save_image,
                      save_segment_map, segment_image)
from .synthetic import (TEST_IMAGES, drift_frames, moving_square_frames,
                        removal_frames)
from .track import Window, annotate, cluster_window, track_sequence

SCHEMA = 1
FRAME_SUFFIXES = (".png", ".ppm")

_ARGV: list = []  # effective command line, recorded by main() for the sidecar


class CLIError(Exception):
    """User-facing failure; printed as one line, exit code 1."""


# ----------------------------------------------------------- option layer

def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CLIError(f"config {path}: invalid JSON ({exc})") from exc
    if not isinstance(cfg, dict):
        raise CLIError(f"config {path}: top level must be a JSON object")
    return {str(k).replace("-", "_"): v for k, v in cfg.items()}


class Opts:
    """Flag > config-file > default resolution for one parsed command."""

    def __init__(self, args):
        self.args = args
        self.cfg = _load_config(getattr(args, "config", None))

    def get(self, name, default=None, required=False):
        value = getattr(self.args, name, None)
        if value is None:
            value = self.cfg.get(name, default)
        if required and value is None:
            flag = "--" + name.replace("_", "-")
            raise CLIError(f"{flag} is required (flag or config)")
        return value


def _shift_config(opts: Opts, h=None) -> ShiftConfig:
    if h is None:
        h = float(opts.get("h", required=True))
    eta = opts.get("eta")
    return ShiftConfig(
        h=h,
        eta=None if eta is None else float(eta),
        max_iters=int(opts.get("max_iters", 300)),
        kernel=str(opts.get("kernel", "flat")))


# ------------------------------------------------------------ persistence

def _write_json(payload: dict, out_path) -> None:
    """Write (or print) a result payload; file outputs get a meta sidecar."""
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
        return
    path = Path(out_path)
    path.write_text(text)
    meta = {"created_unix": time.time(), "argv": _ARGV}
    Path(str(path) + ".meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n")


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])


def _csv_cell(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(v)
    return v


def _max_workers(n_jobs: int) -> int:
    raw = os.environ.get("GRIDSHIFT_THREADS")
    if raw is None:
        cap = min(4, os.cpu_count() or 1)
    else:
        try:
            cap = int(raw)
        except ValueError:
            cap = 0
        if cap < 1:
            raise CLIError(
                f"GRIDSHIFT_THREADS must be a positive integer, got {raw!r}")
    return max(1, min(n_jobs, cap))


# ------------------------------------------------------------ subcommands

def cmd_cluster(args) -> int:
    opts = Opts(args)
    path = opts.get("input", required=True)
    cfg = _shift_config(opts)
    engine = opts.get("engine", "meanshiftpp")
    if engine not in ENGINES:
        raise CLIError(f"unknown engine {engine!r}")
    has_labels = bool(opts.get("labels", False))
    points, truth = load_points_csv(path, label_column=has_labels)
    labeling, trace = ENGINES[engine](points, cfg)
    payload = {
        "schema": SCHEMA,
        "command": "cluster",
        "engine": engine,
        "h": cfg.h,
        "max_iters": cfg.max_iters,
        "n": points.n,
        "d": points.d,
        "k": labeling.k,
        "iterations": trace.iterations,
        "converged": trace.converged,
        "labels": labeling.labels.tolist(),
        "modes": labeling.modes.tolist(),
    }
    if truth is not None:
        payload["ari"] = adjusted_rand_index(labeling.labels, truth)
        payload["ami"] = adjusted_mutual_information(labeling.labels, truth)
    _write_json(payload, opts.get("out"))
    return 0


def _segment_one(in_path, out_path, cfg, mode, engine, down, save_labels):
    img = load_image(in_path)
    for _ in range(down):
        img = downsample(img)
    seg, trace = segment_image(img, cfg, mode=mode, engine=engine)
    save_image(out_path, recolor(img, seg))
    if save_labels:
        save_segment_map(Path(out_path).with_suffix(""), seg, cfg.h, mode)
    return {
        "input": str(in_path),
        "output": str(out_path),
        "width": img.width,
        "height": img.height,
        "k": seg.k,
        "iterations": trace.iterations,
    }


def cmd_segment(args) -> int:
    opts = Opts(args)
    in_path = Path(opts.get("input", required=True))
    out_path = Path(opts.get("out", required=True))
    cfg = _shift_config(opts)
    mode = opts.get("mode", "rgb")
    engine = opts.get("engine", "meanshiftpp")
    if engine not in ENGINES:
        raise CLIError(f"unknown engine {engine!r}")
    down = int(opts.get("downsample", 0))
    save_labels = bool(opts.get("save_labels", False))
    if in_path.is_dir():
        inputs = sorted(p for p in in_path.iterdir()
                        if p.suffix.lower() in FRAME_SUFFIXES)
        if not inputs:
            raise CLIError(f"no PNG/PPM images in {in_path}")
        out_path.mkdir(parents=True, exist_ok=True)
        jobs = [(p, out_path / (p.stem + ".png")) for p in inputs]
        with ThreadPoolExecutor(max_workers=_max_workers(len(jobs))) as pool:
            rows = list(pool.map(
                lambda j: _segment_one(j[0], j[1], cfg, mode, engine, down,
                                       save_labels), jobs))
    else:
        rows = [_segment_one(in_path, out_path, cfg, mode, engine, down,
                             save_labels)]
    payload = {
        "schema": SCHEMA,
        "command": "segment",
        "engine": engine,
        "h": cfg.h,
        "mode": mode,
        "downsample": down,
        "images": rows,
    }
    _write_json(payload, opts.get("report"))
    return 0


def _load_frames(dir_path: Path):
    if not dir_path.is_dir():
        raise CLIError(f"{dir_path} is not a directory of frames")
    paths = sorted(p for p in dir_path.iterdir()
                   if p.suffix.lower() in FRAME_SUFFIXES)
    if not paths:
        raise CLIError(f"no PNG/PPM frames in {dir_path}")
    return paths, [load_image(p) for p in paths]


def cmd_track(args) -> int:
    opts = Opts(args)
    paths, frames = _load_frames(Path(opts.get("frames", required=True)))
    rect = opts.get("window", required=True)
    if len(rect) != 4:
        raise CLIError("--window takes X Y W H (top-left corner plus size)")
    x, y, w, h_px = float(rect[0]), float(rect[1]), int(rect[2]), int(rect[3])
    window0 = Window(cx=x + w / 2.0, cy=y + h_px / 2.0, w=w, h_px=h_px)
    cfg = _shift_config(opts)
    selected = opts.get("select")
    if selected is None:
        # exploratory pass: show the window's clusters so ids can be chosen
        labeling, colors = cluster_window(frames[0], window0, cfg)
        summary = []
        for cid in range(labeling.k):
            member = labeling.labels == cid
            mean = colors[member].mean(axis=0)
            summary.append({
                "id": cid,
                "pixels": int(member.sum()),
                "mean_color": [int(np.floor(c + 0.5)) for c in mean],
            })
        payload = {
            "schema": SCHEMA,
            "command": "track",
            "mode": "preview",
            "k": labeling.k,
            "clusters": summary,
        }
        preview_out = opts.get("preview_out")
        if preview_out:
            x0, y0, x1, y1 = window0.rect(frames[0].width, frames[0].height)
            palette = np.clip(np.floor(labeling.modes + 0.5), 0,
                              255).astype(np.uint8)
            pixels = palette[labeling.labels].reshape(y1 - y0, x1 - x0, 3)
            save_image(preview_out, Image(pixels))
            payload["preview"] = str(preview_out)
        _write_json(payload, opts.get("out"))
        return 0
    states = track_sequence(frames, window0, cfg,
                            [int(c) for c in selected],
                            update_bins=bool(opts.get("update_bins", False)))
    out = opts.get("out", required=True)
    _write_csv(out, ["frame_idx", "cx", "cy", "lost", "match_count"],
               [(i, s.window.cx, s.window.cy, s.lost, s.last_match_count)
                for i, s in enumerate(states)])
    annotate_dir = opts.get("annotate_dir")
    if annotate_dir:
        adir = Path(annotate_dir)
        adir.mkdir(parents=True, exist_ok=True)
        for path, frame, state in zip(paths, frames, states):
            save_image(adir / (path.stem + ".png"),
                       annotate(frame, state.window))
    return 0


def cmd_bench(args) -> int:
    opts = Opts(args)
    engines = list(opts.get("engines", list(ENGINES)))
    n_grid = [int(v) for v in opts.get("n_grid", required=True)]
    spec = default_mixture(
        k=int(opts.get("k", 3)),
        d=int(opts.get("d", 2)),
        sigma=float(opts.get("sigma", 0.1)),
        seed=int(opts.get("seed", 0)))
    timeout = opts.get("timeout")
    records, slopes = bench_scaling(
        engines, n_grid, spec, h=float(opts.get("h", required=True)),
        repeats=int(opts.get("repeats", 3)),
        timeout=None if timeout is None else float(timeout),
        score=bool(opts.get("score", False)))
    payload = {
        "schema": SCHEMA,
        "command": "bench",
        "engines": engines,
        "n_grid": n_grid,
        "mixture": {"k": spec.k, "d": spec.d, "sigma": spec.sigma,
                    "seed": spec.seed},
        "records": [dataclasses.asdict(r) for r in records],
        "slopes": slopes,
    }
    _write_json(payload, opts.get("out"))
    return 0


def cmd_sweep(args) -> int:
    opts = Opts(args)
    points, truth = load_points_csv(opts.get("input", required=True),
                                    label_column=True)
    engine = opts.get("engine", "meanshiftpp")
    h_grid = opts.get("h_grid")
    if h_grid is None:
        lo, hi = opts.get("h_min"), opts.get("h_max")
        step = opts.get("h_step")
        if lo is None or hi is None or step is None:
            raise CLIError("give --h-grid or all of --h-min/--h-max/--h-step")
        # round away arange's accumulation noise (0.6000000000000001)
        h_grid = np.round(np.arange(float(lo), float(hi) + 1e-12,
                                    float(step)), 12).tolist()
    eta = opts.get("eta")
    rows = sweep_bandwidth(points, truth, engine,
                           [float(h) for h in h_grid],
                           eta=None if eta is None else float(eta),
                           max_iters=int(opts.get("max_iters", 300)))
    payload = {
        "schema": SCHEMA,
        "command": "sweep",
        "engine": engine,
        "n": points.n,
        "d": points.d,
        "rows": [dataclasses.asdict(r) for r in rows],
        "best_h": next(r.h for r in rows if r.best),
    }
    _write_json(payload, opts.get("out"))
    csv_out = opts.get("csv")
    if csv_out:
        _write_csv(csv_out,
                   ["h", "ari", "ami", "k", "iters", "wall_time", "best"],
                   [(r.h, r.ari, r.ami, r.k, r.iters, r.wall_time, r.best)
                    for r in rows])
    return 0


def cmd_density_check(args) -> int:
    opts = Opts(args)
    target = make_target(str(opts.get("target", "triangular")),
                         d=int(opts.get("d", 1)))
    report = rate_experiment(
        target,
        [int(v) for v in opts.get("n_grid", required=True)],
        alpha=float(opts.get("alpha", 1.0)),
        seed=int(opts.get("seed", 0)))
    payload = {
        "schema": SCHEMA,
        "command": "density-check",
        "target": str(opts.get("target", "triangular")),
        "d": target.d,
        "alpha": float(opts.get("alpha", 1.0)),
        "seed": int(opts.get("seed", 0)),
        "sample_sizes": [int(v) for v in report.sample_sizes],
        "bandwidths": [float(v) for v in report.bandwidths],
        "sup_errors": [float(v) for v in report.sup_errors],
        "fitted_exponent": report.fitted_exponent,
    }
    _write_json(payload, opts.get("out"))
    csv_out = opts.get("csv")
    if csv_out:
        _write_csv(csv_out, ["n", "h", "sup_error"],
                   list(zip(payload["sample_sizes"], payload["bandwidths"],
                            payload["sup_errors"])))
    return 0


def cmd_generate(args) -> int:
    opts = Opts(args)
    kind = opts.get("kind", "mixture")
    out = opts.get("out", required=True)
    seed = int(opts.get("seed", 0))
    if kind == "mixture":
        spec = default_mixture(
            k=int(opts.get("k", 3)), d=int(opts.get("d", 2)),
            sigma=float(opts.get("sigma", 0.1)), seed=seed)
        points, labels = generate_mixture(spec, int(opts.get("n", 1000)))
        if bool(opts.get("no_labels", False)):
            labels = None
        save_points_csv(out, points, labels)
    elif kind == "image":
        name = opts.get("name", required=True)
        if name not in TEST_IMAGES:
            raise CLIError(
                f"unknown image {name!r}, choose from {sorted(TEST_IMAGES)}")
        save_image(out, TEST_IMAGES[name](seed=seed))
    elif kind == "frames":
        scenario = opts.get("scenario", "moving")
        n_frames = int(opts.get("n", 12))
        if scenario == "moving":
            frames, _ = moving_square_frames(n_frames=n_frames)
        elif scenario == "removal":
            frames, _ = removal_frames(n_present=max(1, n_frames // 2),
                                       n_absent=n_frames - n_frames // 2)
        elif scenario == "drift":
            frames, _ = drift_frames(n_frames=n_frames)
        else:
            raise CLIError(f"unknown scenario {scenario!r}")
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for i, frame in enumerate(frames):
            save_image(out_dir / f"frame_{i:03d}.png", frame)
    else:
        raise CLIError(f"unknown kind {kind!r}")
    return 0


# ------------------------------------------------------------ arg parsing

def _add_common(sub):
    sub.add_argument("--config", help="JSON file supplying flag defaults")
    sub.add_argument("--out", help="output path ('-' or omitted: stdout)")


def _add_shift_flags(sub):
    sub.add_argument("--h", type=float, help="bandwidth (cell side)")
    sub.add_argument("--eta", type=float,
                     help="convergence threshold on total movement")
    sub.add_argument("--max-iters", type=int, dest="max_iters")
    sub.add_argument("--kernel", choices=["flat", "gaussian"],
                     help="baseline engine kernel")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridshift",
        description="grid-based mode-seeking: clustering, segmentation, "
                    "tracking, density checks")
    subs = parser.add_subparsers(dest="cmd", required=True)

    p = subs.add_parser("cluster", help="cluster a CSV of points")
    p.add_argument("--input", help="CSV of points (optional label column)")
    p.add_argument("--engine", choices=sorted(ENGINES))
    p.add_argument("--labels", action=argparse.BooleanOptionalAction,
                   help="treat last CSV column as labels and score ARI/AMI")
    _add_shift_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_cluster)

    p = subs.add_parser("segment", help="segment an image or directory")
    p.add_argument("--input", help="image file or directory of images")
    p.add_argument("--mode", choices=["rgb", "rgbxy"])
    p.add_argument("--engine", choices=sorted(ENGINES))
    p.add_argument("--downsample", type=int,
                   help="halve the image this many times first")
    p.add_argument("--save-labels", dest="save_labels",
                   action=argparse.BooleanOptionalAction,
                   help="also write the label raster and sidecar")
    p.add_argument("--report", help="where to write the JSON report")
    _add_shift_flags(p)
    p.add_argument("--config", help="JSON file supplying flag defaults")
    p.add_argument("--out", help="output image file or directory")
    p.set_defaults(func=cmd_segment)

    p = subs.add_parser("track", help="track a window across frames")
    p.add_argument("--frames", help="directory of numbered PNG/PPM frames")
    p.add_argument("--window", nargs=4, metavar=("X", "Y", "W", "H"),
                   type=float, help="initial window: top-left corner + size")
    p.add_argument("--select", nargs="+", type=int,
                   help="cluster ids to track (omit to preview clusters)")
    p.add_argument("--update-bins", dest="update_bins",
                   action=argparse.BooleanOptionalAction,
                   help="refresh the color bins every frame")
    p.add_argument("--preview-out", dest="preview_out",
                   help="where to write the preview label image")
    p.add_argument("--annotate-dir", dest="annotate_dir",
                   help="write frames with the tracked window drawn")
    _add_shift_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_track)

    p = subs.add_parser("bench", help="runtime scaling across n")
    p.add_argument("--engines", nargs="+", choices=sorted(ENGINES))
    p.add_argument("--n-grid", dest="n_grid", nargs="+", type=int)
    p.add_argument("--k", type=int, help="mixture components")
    p.add_argument("--d", type=int, help="dimension")
    p.add_argument("--sigma", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--timeout", type=float,
                   help="wall cap per run; slower engines get censored")
    p.add_argument("--score", action=argparse.BooleanOptionalAction,
                   help="also score ARI/AMI against mixture components")
    _add_shift_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    p = subs.add_parser("sweep", help="bandwidth sweep scored against labels")
    p.add_argument("--input", help="CSV with a trailing label column")
    p.add_argument("--engine", choices=sorted(ENGINES))
    p.add_argument("--h-grid", dest="h_grid", nargs="+", type=float)
    p.add_argument("--h-min", dest="h_min", type=float)
    p.add_argument("--h-max", dest="h_max", type=float)
    p.add_argument("--h-step", dest="h_step", type=float)
    p.add_argument("--csv", help="also write the sweep table as CSV")
    _add_shift_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("density-check",
                        help="sup-error shrink rate of the cell estimator")
    p.add_argument("--target",
                   choices=["uniform", "triangular", "gaussian"])
    p.add_argument("--d", type=int)
    p.add_argument("--alpha", type=float, help="assumed smoothness in (0,1]")
    p.add_argument("--n-grid", dest="n_grid", nargs="+", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--csv", help="also write (n, h, sup_error) rows as CSV")
    _add_common(p)
    p.set_defaults(func=cmd_density_check)

    p = subs.add_parser("generate", help="synthetic datasets, images, frames")
    p.add_argument("--kind", choices=["mixture", "image", "frames"])
    p.add_argument("--n", type=int, help="points or frames to generate")
    p.add_argument("--k", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--no-labels", dest="no_labels", action="store_true",
                   default=None,
                   help="omit the label column from mixture CSVs")
    p.add_argument("--name", choices=sorted(TEST_IMAGES),
                   help="which bundled test image to render")
    p.add_argument("--scenario", choices=["moving", "removal", "drift"])
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    global _ARGV
    _ARGV = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
