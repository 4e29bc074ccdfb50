"""Frozen VGG features with a trainable linear head, saved as one file.

The convolutional stack is never trained. It comes either from pretrained
weights (when the host can download them) or from a fixed-seed random
initialization, and the choice is recorded in the model file so that loading
rebuilds the exact same feature extractor.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import torch
from PIL import Image
from torch import nn
from torchvision import models

CLASSES = ("invalid", "valid")
VALID_INDEX = CLASSES.index("valid")

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)

ARCHS = {
    "vgg11": models.vgg11,
    "vgg16": models.vgg16,
}

FEATURE_DIM = 512 * 7 * 7


@dataclass(frozen=True)
class ModelMeta:
    """Everything needed to rebuild preprocessing and the feature extractor."""

    arch: str = "vgg16"
    input_edge: int = 300
    pretrained: bool = False
    feature_seed: int = 0
    mean: tuple[float, float, float] = IMAGENET_MEAN
    std: tuple[float, float, float] = IMAGENET_STD

    def __post_init__(self):
        if self.arch not in ARCHS:
            raise ValueError(f"arch must be one of {sorted(ARCHS)}, got {self.arch!r}")
        if self.input_edge < 32:
            raise ValueError(f"input_edge {self.input_edge} below minimum 32")

    def to_dict(self) -> dict:
        return {"arch": self.arch, "input_edge": self.input_edge,
                "pretrained": self.pretrained, "feature_seed": self.feature_seed,
                "mean": list(self.mean), "std": list(self.std),
                "classes": list(CLASSES)}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelMeta":
        return cls(arch=d["arch"], input_edge=int(d["input_edge"]),
                   pretrained=bool(d["pretrained"]),
                   feature_seed=int(d["feature_seed"]),
                   mean=tuple(d["mean"]), std=tuple(d["std"]))


def build_extractor(meta: ModelMeta) -> nn.Module:
    """Frozen conv features + spatial pool, flattened to FEATURE_DIM.

    Raises whatever torchvision raises when pretrained weights are requested
    but cannot be fetched; callers decide whether to fall back.
    """
    ctor = ARCHS[meta.arch]
    if meta.pretrained:
        backbone = ctor(weights="IMAGENET1K_V1")
    else:
        # Seeded so two processes rebuild identical random features.
        torch.manual_seed(meta.feature_seed)
        backbone = ctor(weights=None)
    extractor = nn.Sequential(backbone.features, backbone.avgpool, nn.Flatten())
    for p in extractor.parameters():
        p.requires_grad_(False)
    return extractor.eval()


def image_tensor(img: Image.Image, meta: ModelMeta) -> torch.Tensor:
    resized = img.convert("RGB").resize((meta.input_edge, meta.input_edge),
                                        Image.BILINEAR)
    x = torch.frombuffer(bytearray(resized.tobytes()), dtype=torch.uint8)
    x = x.reshape(meta.input_edge, meta.input_edge, 3).permute(2, 0, 1).float() / 255.0
    mean = torch.tensor(meta.mean).view(3, 1, 1)
    std = torch.tensor(meta.std).view(3, 1, 1)
    return (x - mean) / std


class SidecarClassifier:
    def __init__(self, meta: ModelMeta, extractor: nn.Module, head: nn.Linear):
        self.meta = meta
        self.extractor = extractor
        self.head = head.eval()

    @torch.no_grad()
    def features(self, images: list[Image.Image], chunk: int = 8) -> torch.Tensor:
        batch = torch.stack([image_tensor(img, self.meta) for img in images])
        return torch.cat([self.extractor(batch[i:i + chunk])
                          for i in range(0, len(batch), chunk)])

    @torch.no_grad()
    def classify(self, images: list[Image.Image]) -> list[tuple[bool, float]]:
        """(valid, confidence) per image; confidence is the winning-class probability."""
        probs = torch.softmax(self.head(self.features(images)), dim=1)
        out = []
        for row in probs:
            winner = int(row.argmax())
            out.append((winner == VALID_INDEX, float(row[winner])))
        return out

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save({"meta": self.meta.to_dict(),
                    "head": self.head.state_dict()}, path)
        return path

    @classmethod
    def load(cls, path: str | Path) -> "SidecarClassifier":
        payload = torch.load(Path(path), map_location="cpu", weights_only=True)
        meta = ModelMeta.from_dict(payload["meta"])
        head = nn.Linear(FEATURE_DIM, len(CLASSES))
        head.load_state_dict(payload["head"])
        return cls(meta, build_extractor(meta), head)
