"""Regenerate the bundled synthetic CSV.

The file is committed; run this only when the recipe changes.  The
response is additive in x1 and x2 with one x2*x3 interaction and a dash
of noise, so every model family has something to find.
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from glassbox.dataset import Dataset, write_csv  # noqa: E402

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "glassbox",
                   "datasets", "synthetic_additive.csv")


def main() -> None:
    rng = np.random.default_rng(20240811)
    n = 120
    x1 = rng.uniform(-2.0, 2.0, size=n)
    x2 = rng.uniform(0.0, 4.0, size=n)
    x3 = rng.uniform(-1.0, 1.0, size=n)
    y = (
        1.5
        + 2.0 * np.sin(x1)
        + 0.5 * (x2 - 2.0) ** 2
        + 1.0 * np.maximum(x2 - 2.5, 0.0) * np.maximum(x3 - 0.0, 0.0)
        + rng.normal(0.0, 0.05, size=n)
    )
    d = Dataset(("x1", "x2", "x3"), np.column_stack([x1, x2, x3]), y)
    write_csv(d, os.path.abspath(OUT))
    print(f"wrote {os.path.abspath(OUT)} ({n} rows)")


if __name__ == "__main__":
    main()
