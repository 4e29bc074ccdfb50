"""Transfer-learn the binary head over frozen features from a labels CSV."""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path

import torch
from PIL import Image
from torch import nn

from .model import (CLASSES, FEATURE_DIM, ModelMeta, SidecarClassifier,
                    build_extractor)

PRETRAINED_MODES = ("auto", "never", "require")


class InsufficientData(ValueError):
    """Training was asked for with fewer than two usable classes."""


@dataclass(frozen=True)
class TrainConfig:
    """Head-training defaults; the feature extractor is never updated.

    Full-batch Adam on the linear head. ``pretrained`` controls the conv
    weights: ``auto`` tries to fetch them and silently falls back to the
    fixed-seed random extractor when the download fails, ``never`` skips the
    attempt, ``require`` propagates the failure.
    """

    epochs: int = 200
    lr: float = 1e-3
    weight_decay: float = 0.0
    seed: int = 0
    test_frac: float = 0.1
    input_edge: int = 300
    arch: str = "vgg16"
    pretrained: str = "auto"

    def __post_init__(self):
        if not 1 <= self.epochs <= 200:
            raise ValueError(f"epochs must be in [1, 200], got {self.epochs}")
        if not 0.0 < self.test_frac < 0.5:
            raise ValueError(f"test_frac must be in (0, 0.5), got {self.test_frac}")
        if self.pretrained not in PRETRAINED_MODES:
            raise ValueError(f"pretrained must be one of {PRETRAINED_MODES}, "
                             f"got {self.pretrained!r}")


def read_labels(csv_path: str | Path) -> list[tuple[Path, str]]:
    """Rows of (image path, label); relative paths resolve against the CSV.

    A leading ``path,label`` header row is optional.
    """
    csv_path = Path(csv_path)
    rows = []
    with csv_path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (lineno == 1 and [c.strip().lower() for c in row] == ["path", "label"]):
                continue
            if len(row) != 2:
                raise ValueError(f"{csv_path}:{lineno}: expected 'path,label', got {row!r}")
            path, label = row[0].strip(), row[1].strip().lower()
            if label not in CLASSES:
                raise ValueError(f"{csv_path}:{lineno}: label must be one of "
                                 f"{CLASSES}, got {label!r}")
            resolved = Path(path)
            if not resolved.is_absolute():
                resolved = csv_path.parent / resolved
            if not resolved.exists():
                raise FileNotFoundError(f"{csv_path}:{lineno}: no such image {resolved}")
            rows.append((resolved, label))
    if not rows:
        raise InsufficientData(f"{csv_path} contains no labeled images")
    return rows


def split_indices(labels: list[str], test_frac: float,
                  seed: int) -> tuple[list[int], list[int]]:
    """Disjoint stratified train/test index lists covering every sample."""
    by_class: dict[str, list[int]] = {}
    for i, label in enumerate(labels):
        by_class.setdefault(label, []).append(i)
    if len(by_class) < 2:
        raise InsufficientData(
            f"need both {CLASSES[0]} and {CLASSES[1]} examples, "
            f"got only {sorted(by_class)}")
    for label, members in by_class.items():
        if len(members) < 2:
            raise InsufficientData(
                f"class {label!r} has {len(members)} example(s); need at least 2")
    rng = random.Random(seed)
    train_idx, test_idx = [], []
    for label in sorted(by_class):
        members = by_class[label][:]
        rng.shuffle(members)
        n_test = max(1, round(len(members) * test_frac))
        test_idx.extend(members[:n_test])
        train_idx.extend(members[n_test:])
    return sorted(train_idx), sorted(test_idx)


def _resolve_extractor(cfg: TrainConfig) -> tuple[ModelMeta, nn.Module]:
    meta = ModelMeta(arch=cfg.arch, input_edge=cfg.input_edge,
                     pretrained=cfg.pretrained != "never", feature_seed=cfg.seed)
    if not meta.pretrained:
        return meta, build_extractor(meta)
    try:
        return meta, build_extractor(meta)
    except Exception:
        if cfg.pretrained == "require":
            raise
        meta = ModelMeta(arch=cfg.arch, input_edge=cfg.input_edge,
                         pretrained=False, feature_seed=cfg.seed)
        return meta, build_extractor(meta)


def train(labels_csv: str | Path, out_path: str | Path,
          cfg: TrainConfig = TrainConfig()) -> dict:
    """Fit the head, report held-out accuracy, save the model file."""
    rows = read_labels(labels_csv)
    labels = [label for _, label in rows]
    train_idx, test_idx = split_indices(labels, cfg.test_frac, cfg.seed)

    meta, extractor = _resolve_extractor(cfg)
    torch.manual_seed(cfg.seed)
    head = nn.Linear(FEATURE_DIM, len(CLASSES))
    classifier = SidecarClassifier(meta, extractor, head)

    images = []
    for path, _ in rows:
        with Image.open(path) as img:
            images.append(img.convert("RGB"))
    feats = classifier.features(images)
    targets = torch.tensor([CLASSES.index(label) for label in labels])

    head.train()
    optimizer = torch.optim.Adam(head.parameters(), lr=cfg.lr,
                                 weight_decay=cfg.weight_decay)
    loss_fn = nn.CrossEntropyLoss()
    x_train, y_train = feats[train_idx], targets[train_idx]
    for _ in range(cfg.epochs):
        optimizer.zero_grad()
        loss = loss_fn(head(x_train), y_train)
        loss.backward()
        optimizer.step()
    head.eval()

    with torch.no_grad():
        predicted = head(feats[test_idx]).argmax(dim=1)
    accuracy = float((predicted == targets[test_idx]).float().mean())

    saved = classifier.save(out_path)
    return {"model": str(saved), "test_accuracy": accuracy,
            "n_train": len(train_idx), "n_test": len(test_idx),
            "pretrained": meta.pretrained}
