"""Binary frame classifier served over the psc2code classifier wire protocol."""

from .model import CLASSES, ModelMeta, SidecarClassifier
from .server import create_app
from .train import InsufficientData, TrainConfig, read_labels, split_indices, train

__all__ = [
    "CLASSES",
    "ModelMeta",
    "SidecarClassifier",
    "create_app",
    "InsufficientData",
    "TrainConfig",
    "read_labels",
    "split_indices",
    "train",
]
