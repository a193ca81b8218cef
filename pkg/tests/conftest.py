import pathlib

import numpy as np
import pytest

from transbound.transduce import Dataset, LabeledSubset

DATA_DIR = pathlib.Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def two_blob():
    """The committed 100-point two-blob fixture: (dataset, labeled, true labels)."""
    pts = np.loadtxt(DATA_DIR / "two_blob_features.csv", delimiter=",")
    data = Dataset(points=pts, ids=np.arange(len(pts)))
    rows = np.loadtxt(DATA_DIR / "two_blob_labels.csv", delimiter=",", dtype=np.int64)
    labeled = LabeledSubset(indices=rows[:, 0], labels=rows[:, 1])
    truth = np.where(np.arange(len(pts)) % 2 == 0, 1, -1)
    return data, labeled, truth
