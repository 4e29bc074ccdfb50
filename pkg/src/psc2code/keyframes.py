"""Drop non-informative (near-duplicate) consecutive frames.

Dissimilarity between frames is the root-mean-square error of their
grayscale rasters normalized by the full 8-bit range, so it lies in
[0, 1] with 0 for identical frames and 1 for all-black vs all-white.
The scan keeps the first frame as an anchor and drops every subsequent
frame whose dissimilarity to the anchor is below the threshold; a frame
at or above the threshold is kept and becomes the new anchor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .frames import Frame

DEFAULT_THRESHOLD = 0.05


class DimensionMismatch(Exception):
    """Compared frames have different raster dimensions."""


class EmptySequence(Exception):
    """No frames to filter."""


@dataclass
class InformativeSet:
    """Result of the near-duplicate scan over one video."""

    kept: list[int]
    dropped: list[tuple[int, int]]  # (dropped t, anchor t that subsumed it)
    threshold: float
    flagged: list[int] = field(default_factory=list)  # kept due to dimension mismatch

    def to_dict(self) -> dict:
        d = {
            "threshold": self.threshold,
            "kept": self.kept,
            "dropped": [list(pair) for pair in self.dropped],
        }
        if self.flagged:
            d["flagged"] = self.flagged
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "InformativeSet":
        return cls(
            kept=[int(t) for t in d["kept"]],
            dropped=[(int(a), int(b)) for a, b in d["dropped"]],
            threshold=float(d["threshold"]),
            flagged=[int(t) for t in d.get("flagged", [])],
        )


def nrmse(a: Frame, b: Frame) -> float:
    """Grayscale RMS difference normalized to [0, 1]."""
    if a.gray.shape != b.gray.shape:
        raise DimensionMismatch(f"{a.gray.shape} vs {b.gray.shape}")
    diff = a.gray.astype(np.float64) - b.gray.astype(np.float64)
    return float(np.sqrt(np.mean(diff * diff)) / 255.0)


def filter_informative(frames: list[Frame], threshold: float = DEFAULT_THRESHOLD) -> InformativeSet:
    """Anchor scan over a strictly t-ordered frame sequence.

    Frames whose dimensions differ from the current anchor (corrupt decode)
    are kept unconditionally and flagged, never silently resized.
    """
    if not frames:
        raise EmptySequence("no frames")
    anchor = frames[0]
    kept = [anchor.t]
    dropped: list[tuple[int, int]] = []
    flagged: list[int] = []
    for frame in frames[1:]:
        if frame.gray.shape != anchor.gray.shape:
            kept.append(frame.t)
            flagged.append(frame.t)
            anchor = frame
            continue
        if nrmse(anchor, frame) < threshold:
            dropped.append((frame.t, anchor.t))
        else:
            kept.append(frame.t)
            anchor = frame
    return InformativeSet(kept=kept, dropped=dropped, threshold=threshold, flagged=flagged)
