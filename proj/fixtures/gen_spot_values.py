#!/usr/bin/env python3
"""Regenerate target_spot_values.csv.

Scalar transcription of the four benchmark targets, kept deliberately
independent of the C++ implementation: the test suite compares library
output against this table, so the formulas below must come from the task
definitions, not from src/bench.cpp.
"""

import csv
import math
import pathlib


def square(x0, x1):
    return x0 * x0


def product(x0, x1):
    return x0 * x1


def l1_radial(x0, x1):
    return max(abs(x0) + abs(x1) - 1.0, 0.0)


def l2_radial(x0, x1):
    t = x0 * x0 + x1 * x1
    if t > 1.0:
        return 0.0
    return (1.0 - t) ** 5 * (8.0 * t * t + 5.0 * t + 1.0)


POINTS = {
    "square": [(x, 0.0) for x in
               (-2.0, -1.0, -0.77, -0.5, -0.123456789, 0.0, 0.25, 0.5, 0.77, 1.0, 1.3)],
    "product": [(-1.0, -1.0), (-1.0, 1.0), (-0.3, 0.2), (0.2, 0.7), (0.5, -0.8),
                (0.7, 0.7), (1.0, 1.0), (0.123, 0.456), (0.0, 0.9)],
    "l1_radial": [(0.75, 0.75), (1.125, 1.125), (0.75, 1.125), (0.9, 0.85),
                  (1.0, 1.0), (0.4, 0.6), (0.1, 0.2), (-0.9, 0.8), (0.0, 0.0),
                  (-0.6, -0.7)],
    "l2_radial": [(0.0, 0.0), (0.5, 0.5), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0),
                  (0.3, -0.4), (-0.25, 0.25), (0.8, 0.1), (2.0, 2.0),
                  (0.70710678118654752, 0.70710678118654752)],
}

FUNCS = {"square": square, "product": product,
         "l1_radial": l1_radial, "l2_radial": l2_radial}


def main():
    out = pathlib.Path(__file__).resolve().parent / "target_spot_values.csv"
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["target", "x0", "x1", "expected"])
        for name, pts in POINTS.items():
            f = FUNCS[name]
            for x0, x1 in pts:
                w.writerow([name, repr(x0), repr(x1), repr(f(x0, x1))])
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
