"""Regenerate the committed two-blob fixture byte-identically.

Two well-separated Gaussian blobs of 50 points each, interleaved by id so
that the first 50 ids (the training set) cover both blobs evenly.  Blob A
(around the origin) is labelled +1, blob B (around (8, 8)) is labelled -1.
"""

import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"


def two_blob_points() -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(7)
    n = 100
    centers = np.array([[0.0, 0.0], [8.0, 8.0]])
    which = np.arange(n) % 2  # even id -> blob A, odd id -> blob B
    points = centers[which] + 0.4 * rng.standard_normal((n, 2))
    labels = np.where(which == 0, 1, -1)
    return points, labels


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    points, labels = two_blob_points()
    with open(OUT / "two_blob_features.csv", "w", newline="\n") as f:
        for row in points:
            f.write(",".join(format(x, ".12g") for x in row) + "\n")
    with open(OUT / "two_blob_labels.csv", "w", newline="\n") as f:
        for i in range(50):
            f.write(f"{i},{'+1' if labels[i] == 1 else '-1'}\n")
    print("wrote", OUT)


if __name__ == "__main__":
    main()
