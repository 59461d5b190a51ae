#!/usr/bin/env python3
"""Regenerate synthetic_separable.csv.

Two features on wildly different raw scales (1e4 vs 1e-2) whose standardized
sum separates the classes with margin 0.4. Raw-scale inputs saturate a
sigmoid net immediately, so the fixture only trains well after z-scoring,
which is exactly what the ingestion pipeline is supposed to provide. Labels
use the intensity coding: 2 for the positive class, 7 for the negative.
"""

import csv
import pathlib
import random


def main():
    rng = random.Random(20240817)
    rows = []
    pos = neg = 0
    while pos < 100 or neg < 100:
        za = rng.gauss(0.0, 1.0)
        zb = rng.gauss(0.0, 1.0)
        s = za + zb
        if abs(s) < 0.4:
            continue
        if s > 0:
            if pos == 100:
                continue
            pos += 1
            grade = 2
        else:
            if neg == 100:
                continue
            neg += 1
            grade = 7
        a = 5.0e4 + 1.2e4 * za
        b = 0.03 + 0.008 * zb
        rows.append((repr(a), repr(b), grade))
    rng.shuffle(rows)

    out = pathlib.Path(__file__).resolve().parent / "synthetic_separable.csv"
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sensor_a", "sensor_b", "grade"])
        w.writerows(rows)
    print(f"wrote {out} ({pos} positive, {neg} negative)")


if __name__ == "__main__":
    main()
