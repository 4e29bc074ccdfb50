"""Valid/invalid frame classification behind a pluggable backend.

A frame is valid when it shows an entire, unoccluded code editor. Three
backends share one verdict type: a geometric heuristic (sub-window layout
evidence only, no learning), an external HTTP classifier speaking the wire
protocol below, and a fixture backend that replays labels from a JSON file.
"""

from __future__ import annotations

import base64
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import cv2

from .frames import Frame
from .layout import LayoutConfig, Rect, cluster_segments, detect_segments, enumerate_rectangles

BACKENDS = ("heuristic", "external", "fixture")


class ExternalUnavailable(RuntimeError):
    """The external classifier endpoint could not be reached."""


class FixtureMissingLabel(KeyError):
    """The fixture label file has no entry for a requested frame time."""


@dataclass(frozen=True)
class FrameVerdict:
    t: int
    valid: bool
    confidence: float
    backend: str

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")

    def to_dict(self) -> dict:
        return {"t": self.t, "valid": self.valid,
                "confidence": self.confidence, "backend": self.backend}

    @classmethod
    def from_dict(cls, d: dict) -> "FrameVerdict":
        return cls(int(d["t"]), bool(d["valid"]), float(d["confidence"]), d["backend"])


@dataclass(frozen=True)
class ClassifierConfig:
    """Backend selection plus the heuristic's geometric thresholds.

    ``min_region_frac`` is the editor-area floor relative to the frame;
    candidates above ``max_region_frac`` are treated as the frame itself
    rather than a sub-window. A candidate strictly inside the editor whose
    area falls within the popup band marks the frame invalid.
    """

    backend: str = "heuristic"
    endpoint: str | None = None
    fixture_labels: str | Path | None = None
    rescale_edge: int = 300
    concurrency: int = 4
    timeout_s: float = 10.0
    min_region_frac: float = 0.10
    max_region_frac: float = 0.95
    popup_min_frac: float = 0.01
    popup_max_frac: float = 0.40
    popup_margin_px: float = 2.0
    layout: LayoutConfig = field(default_factory=LayoutConfig)

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.rescale_edge < 32:
            raise ValueError(f"rescale_edge {self.rescale_edge} below minimum 32")
        if self.backend == "external" and not self.endpoint:
            raise ValueError("external backend requires an endpoint URL")
        if self.backend == "fixture" and not self.fixture_labels:
            raise ValueError("fixture backend requires a label file path")


def heuristic_classify(frame: Frame, cfg: ClassifierConfig = ClassifierConfig()) -> FrameVerdict:
    """Geometric validity check: an editor-sized cell with no popup inside.

    Works on the raw rectangle candidates of a single frame (no cross-frame
    denoising): the largest sub-window candidate must cover at least
    ``min_region_frac`` of the frame, and no candidate strictly inside it may
    have popup-like size. Degenerate frames with no line structure yield only
    the full-frame rectangle, which never counts as an editor.
    """
    height, width = frame.gray.shape
    catalog = cluster_segments(detect_segments(frame, cfg.layout),
                               cfg.layout.cluster_eps_px, cfg.layout.overlap_min)
    candidates = enumerate_rectangles(catalog, (width, height), cfg.layout)
    frame_area = width * height
    interior = [r for r in candidates if r.area < cfg.max_region_frac * frame_area]
    region = None
    for rect in interior:
        if rect.area >= cfg.min_region_frac * frame_area:
            if region is None or (rect.area, -rect.x, -rect.y) > (region.area, -region.x, -region.y):
                region = rect
    if region is None:
        return FrameVerdict(frame.t, False, 1.0, "heuristic")
    lo = cfg.popup_min_frac * region.area
    hi = cfg.popup_max_frac * region.area
    for rect in candidates:
        if rect == region:
            continue
        if region.contains_strictly(rect, cfg.popup_margin_px) and lo <= rect.area <= hi:
            return FrameVerdict(frame.t, False, 1.0, "heuristic")
    return FrameVerdict(frame.t, True, 1.0, "heuristic")


def _fixture_verdicts(frames: list[Frame], cfg: ClassifierConfig) -> list[FrameVerdict]:
    labels = json.loads(Path(cfg.fixture_labels).read_text())
    verdicts = []
    for frame in frames:
        key = str(frame.t)
        if key not in labels:
            raise FixtureMissingLabel(f"no label for frame t={frame.t} in {cfg.fixture_labels}")
        entry = labels[key]
        if isinstance(entry, dict):
            verdicts.append(FrameVerdict(frame.t, bool(entry["valid"]),
                                         float(entry.get("confidence", 1.0)), "fixture"))
        else:
            verdicts.append(FrameVerdict(frame.t, bool(entry), 1.0, "fixture"))
    return verdicts


def _encode_rescaled(frame: Frame, edge: int) -> str:
    bgr = cv2.cvtColor(frame.color, cv2.COLOR_RGB2BGR)
    resized = cv2.resize(bgr, (edge, edge), interpolation=cv2.INTER_LINEAR)
    ok, buf = cv2.imencode(".png", resized)
    if not ok:
        raise RuntimeError(f"png encoding failed for frame t={frame.t}")
    return base64.b64encode(buf.tobytes()).decode("ascii")


def _external_one(frame: Frame, cfg: ClassifierConfig) -> FrameVerdict:
    import httpx

    payload = {"t": frame.t, "png_base64": _encode_rescaled(frame, cfg.rescale_edge)}
    try:
        resp = httpx.post(cfg.endpoint.rstrip("/") + "/classify",
                          json=payload, timeout=cfg.timeout_s)
        resp.raise_for_status()
    except Exception as exc:
        raise ExternalUnavailable(
            f"classifier endpoint {cfg.endpoint} unreachable ({exc}); "
            "rerun with --classifier heuristic or --classifier fixture") from exc
    body = resp.json()
    if body.get("t") != frame.t:
        raise ExternalUnavailable(
            f"classifier echoed t={body.get('t')} for request t={frame.t}")
    return FrameVerdict(frame.t, bool(body["valid"]), float(body["confidence"]), "external")


def classify_frames(frames: list[Frame],
                    cfg: ClassifierConfig = ClassifierConfig()) -> list[FrameVerdict]:
    """One verdict per informative frame, sorted by frame time.

    The external backend sends ``rescale_edge`` square bilinear resizes and
    may keep several requests in flight; heuristic and fixture backends see
    the original pixels.
    """
    if not frames:
        raise ValueError("no frames to classify")
    if cfg.backend == "fixture":
        verdicts = _fixture_verdicts(frames, cfg)
    elif cfg.backend == "external":
        with ThreadPoolExecutor(max_workers=max(1, cfg.concurrency)) as pool:
            verdicts = list(pool.map(lambda f: _external_one(f, cfg), frames))
    else:
        verdicts = [heuristic_classify(frame, cfg) for frame in frames]
    return sorted(verdicts, key=lambda v: v.t)
