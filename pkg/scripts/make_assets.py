#!/usr/bin/env python3
"""Regenerate everything under assets/.

The test images are procedural (seeded), so the committed PNGs can
always be rebuilt bit-for-bit.  The Iris table is exported through
scikit-learn, which is only needed when re-running this script, never
at package runtime.

Usage: python scripts/make_assets.py [assets_dir]
"""

import csv
import sys
from pathlib import Path

from gridshift.segment import save_image
from gridshift.synthetic import TEST_IMAGES


def write_iris(path: Path) -> None:
    try:
        from sklearn.datasets import load_iris
    except ImportError:
        sys.exit("scikit-learn is needed to regenerate iris.csv "
                 "(pip install scikit-learn)")
    bunch = load_iris()
    names = [bunch.target_names[t] for t in bunch.target]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sepal_length", "sepal_width", "petal_length",
                         "petal_width", "species"])
        for row, name in zip(bunch.data, names):
            writer.writerow([repr(float(v)) for v in row] + [name])
    print(f"wrote {path} ({len(names)} rows)")


def write_images(img_dir: Path) -> None:
    img_dir.mkdir(parents=True, exist_ok=True)
    for name, make in sorted(TEST_IMAGES.items()):
        out = img_dir / f"{name}.png"
        save_image(out, make())
        print(f"wrote {out}")


def main() -> None:
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else \
        Path(__file__).resolve().parent.parent / "assets"
    root.mkdir(parents=True, exist_ok=True)
    write_iris(root / "iris.csv")
    write_images(root / "images")


if __name__ == "__main__":
    main()
