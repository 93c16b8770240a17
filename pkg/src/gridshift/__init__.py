"""Grid-based mode-seeking: clustering, segmentation, tracking, density.

The public surface re-exported here is what the command line is built
from; everything else is an implementation detail.
"""

from .bench import BenchRecord, SweepRow, bench_scaling, sweep_bandwidth
from .data import (GaussianMixtureSpec, default_mixture, generate_mixture,
                   load_points_csv, save_points_csv)
from .density import (DensityEstimate, RateReport, evaluate, evaluate_many,
                      fit_density, make_target, rate_experiment)
from .grid import CellTables, PointSet, bin_point, bin_points, \
    build_cell_tables, neighbor_aggregate
from .metrics import (ContingencyTable, adjusted_mutual_information,
                      adjusted_rand_index, fowlkes_mallows)
from .modeseek import (ENGINES, Labeling, ShiftConfig, ShiftTrace,
                       extract_clusters, meanshift_baseline, meanshiftpp,
                       meanshiftpp_step)
from .segment import (Image, SegmentMap, downsample, image_to_features,
                      load_image, recolor, save_image, save_segment_map,
                      segment_image)
from .track import (BinSet, TrackState, Window, init_tracker, track_frame,
                    track_sequence)

__all__ = [
    "BenchRecord", "BinSet", "CellTables", "ContingencyTable",
    "DensityEstimate", "ENGINES", "GaussianMixtureSpec", "Image", "Labeling",
    "PointSet", "RateReport", "SegmentMap", "ShiftConfig", "ShiftTrace",
    "SweepRow", "TrackState", "Window", "adjusted_mutual_information",
    "adjusted_rand_index", "bench_scaling", "bin_point", "bin_points",
    "build_cell_tables", "default_mixture", "downsample", "evaluate",
    "evaluate_many", "extract_clusters", "fit_density", "fowlkes_mallows",
    "generate_mixture", "image_to_features", "init_tracker", "load_image",
    "load_points_csv", "make_target", "meanshift_baseline", "meanshiftpp",
    "meanshiftpp_step", "neighbor_aggregate", "rate_experiment", "recolor",
    "save_image", "save_points_csv", "save_segment_map", "segment_image",
    "sweep_bandwidth", "track_frame", "track_sequence",
]
