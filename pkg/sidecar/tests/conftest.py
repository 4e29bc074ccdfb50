import csv
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from imagegen import ide_image, slide_image

from cnn_sidecar import TrainConfig, train


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """40 labeled images, 20 per class, plus their labels.csv."""
    root = tmp_path_factory.mktemp("sidecar_corpus")
    rows = []
    for i in range(20):
        rng = np.random.default_rng(1000 + i)
        name = f"ide_{i:02d}.png"
        ide_image(rng).save(root / name)
        rows.append((name, "valid"))
    for i in range(20):
        rng = np.random.default_rng(2000 + i)
        name = f"slide_{i:02d}.png"
        slide_image(rng).save(root / name)
        rows.append((name, "invalid"))
    labels_csv = root / "labels.csv"
    with labels_csv.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "label"])
        writer.writerows(rows)
    return {"root": root, "labels_csv": labels_csv, "rows": rows}


@pytest.fixture(scope="session")
def trained(corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("sidecar_model") / "model.pt"
    summary = train(corpus["labels_csv"], out, TrainConfig())
    return {"model": out, "summary": summary}
