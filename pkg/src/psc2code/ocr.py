"""OCR over cropped code regions and positional line reconstruction.

Recognition is delegated to one of three interchangeable backends: a remote
vision API (authenticated via ``PSC2CODE_VISION_KEY``), a local OCR
subprocess, or a record/replay fixture store. All return positioned words in
region coordinates; ``reconstruct_lines`` turns them into indented code lines
using only the word geometry.
"""

from __future__ import annotations

import base64
import json
import os
import shutil
import statistics
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from .frames import Frame
from .layout import Rect

VISION_KEY_ENV = "PSC2CODE_VISION_KEY"
DEFAULT_REMOTE_ENDPOINT = "https://vision.googleapis.com/v1/images:annotate"


class BackendUnavailable(RuntimeError):
    """The OCR backend cannot produce a response for this frame."""


class QuotaExceeded(BackendUnavailable):
    """The remote backend rejected the request for quota reasons."""


@dataclass(frozen=True)
class OcrWord:
    text: str
    box: tuple[int, int, int, int]

    def __post_init__(self):
        if not self.text:
            raise ValueError("empty OCR word")
        if self.box[2] <= 0 or self.box[3] <= 0:
            raise ValueError(f"degenerate box {self.box}")

    @property
    def center_y(self) -> float:
        return self.box[1] + self.box[3] / 2.0

    def to_dict(self) -> dict:
        return {"text": self.text, "box": list(self.box)}

    @classmethod
    def from_dict(cls, d: dict) -> "OcrWord":
        x, y, w, h = d["box"]
        return cls(d["text"], (int(x), int(y), int(w), int(h)))


@dataclass
class CodeSnapshot:
    """Reconstructed code of one frame: ordered lines plus per-line words."""

    t: int
    lines: list[str]
    words: list[list[OcrWord]]

    def text(self) -> str:
        return "\n".join(self.lines)


def words_to_json(words: list[OcrWord]) -> dict:
    return {"words": [w.to_dict() for w in words]}


def words_from_json(payload: dict) -> list[OcrWord]:
    return [OcrWord.from_dict(d) for d in payload.get("words", [])]


class FixtureOcrBackend:
    """Replays stored word lists from ``<dir>/<t>.json`` files."""

    name = "fixture"

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def recognize(self, image: np.ndarray, t: int) -> list[OcrWord]:
        path = self.directory / f"{t}.json"
        if not path.is_file():
            raise BackendUnavailable(f"no recorded OCR response for t={t} under {self.directory}")
        return words_from_json(json.loads(path.read_text()))


class LocalOcrBackend:
    """Runs a tesseract-compatible binary on the crop and parses TSV words."""

    name = "local"

    def __init__(self, binary: str = "tesseract"):
        self.binary = binary

    def available(self) -> bool:
        return shutil.which(self.binary) is not None

    def recognize(self, image: np.ndarray, t: int) -> list[OcrWord]:
        if not self.available():
            raise BackendUnavailable(f"{self.binary} not found on PATH")
        with tempfile.TemporaryDirectory(prefix="psc2code-ocr-") as tmp:
            png = Path(tmp) / "crop.png"
            cv2.imwrite(str(png), cv2.cvtColor(image, cv2.COLOR_RGB2BGR))
            proc = subprocess.run(
                [self.binary, str(png), "stdout", "--psm", "6", "tsv"],
                capture_output=True, text=True)
        if proc.returncode != 0:
            raise BackendUnavailable(f"{self.binary} failed: {proc.stderr.strip()}")
        words = []
        rows = proc.stdout.splitlines()
        if not rows:
            return words
        header = rows[0].split("\t")
        idx = {name: i for i, name in enumerate(header)}
        for row in rows[1:]:
            cols = row.split("\t")
            if len(cols) != len(header) or cols[idx["level"]] != "5":
                continue
            text = cols[idx["text"]].strip()
            if not text:
                continue
            words.append(OcrWord(text, (int(cols[idx["left"]]), int(cols[idx["top"]]),
                                        int(cols[idx["width"]]), int(cols[idx["height"]]))))
        return words


class RemoteOcrBackend:
    """Vision-API-shaped HTTP client with retry and exponential backoff."""

    name = "remote"

    def __init__(self, endpoint: str | None = None, api_key: str | None = None,
                 timeout_s: float = 15.0, retries: int = 2, backoff_s: float = 0.5):
        self.endpoint = endpoint or DEFAULT_REMOTE_ENDPOINT
        self.api_key = api_key if api_key is not None else os.environ.get(VISION_KEY_ENV, "")
        self.timeout_s = timeout_s
        self.retries = retries
        self.backoff_s = backoff_s

    def recognize(self, image: np.ndarray, t: int) -> list[OcrWord]:
        import httpx

        ok, buf = cv2.imencode(".png", cv2.cvtColor(image, cv2.COLOR_RGB2BGR))
        if not ok:
            raise BackendUnavailable(f"png encoding failed for t={t}")
        body = {"requests": [{
            "image": {"content": base64.b64encode(buf.tobytes()).decode("ascii")},
            "features": [{"type": "TEXT_DETECTION"}],
        }]}
        params = {"key": self.api_key} if self.api_key else {}
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff_s * 2 ** (attempt - 1))
            try:
                resp = httpx.post(self.endpoint, params=params, json=body,
                                  timeout=self.timeout_s)
            except Exception as exc:
                last_error = exc
                continue
            if resp.status_code == 429:
                raise QuotaExceeded(f"quota exhausted at t={t}: {resp.text[:200]}")
            if resp.status_code >= 500:
                last_error = RuntimeError(f"HTTP {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise BackendUnavailable(f"HTTP {resp.status_code} at t={t}: {resp.text[:200]}")
            return self._parse(resp.json())
        raise BackendUnavailable(f"remote OCR unreachable at t={t}: {last_error}")

    @staticmethod
    def _parse(payload: dict) -> list[OcrWord]:
        responses = payload.get("responses") or [{}]
        annotations = responses[0].get("textAnnotations") or []
        words = []
        # First annotation is the whole-region transcript; the rest are words.
        for ann in annotations[1:]:
            vertices = ann.get("boundingPoly", {}).get("vertices", [])
            xs = [v.get("x", 0) for v in vertices]
            ys = [v.get("y", 0) for v in vertices]
            if not xs or not ys:
                continue
            text = ann.get("description", "").strip()
            if not text:
                continue
            x, y = min(xs), min(ys)
            words.append(OcrWord(text, (x, y, max(max(xs) - x, 1), max(max(ys) - y, 1))))
        return words


def crop_region(frame: Frame, region: Rect) -> np.ndarray:
    height, width = frame.gray.shape
    x0 = max(0, region.x)
    y0 = max(0, region.y)
    x1 = min(width, region.x + region.w)
    y1 = min(height, region.y + region.h)
    if x1 <= x0 or y1 <= y0:
        raise ValueError(f"region {region} lies outside frame {width}x{height}")
    return frame.color[y0:y1, x0:x1]


def ocr_region(frame: Frame, region: Rect, backend) -> list[OcrWord]:
    """Recognize the cropped region; boxes come back in region coordinates."""
    return backend.recognize(crop_region(frame, region), frame.t)


def reconstruct_lines(words: list[OcrWord], t: int = 0) -> CodeSnapshot:
    """Group positioned words into indented code lines.

    Words whose vertical centers sit within 0.6 of the median word height of
    the current line's running center belong to one line. Indentation is
    rebuilt from the first word's x offset measured in median character
    widths. The result depends only on the word set, not its order.
    """
    if not words:
        return CodeSnapshot(t=t, lines=[], words=[])
    ordered = sorted(words, key=lambda w: (w.center_y, w.box[0], w.text))
    median_h = statistics.median(w.box[3] for w in ordered)
    tol = 0.6 * median_h
    groups: list[list[OcrWord]] = []
    centers: list[float] = []
    for word in ordered:
        if groups and abs(word.center_y - centers[-1]) <= tol:
            groups[-1].append(word)
            centers[-1] = sum(w.center_y for w in groups[-1]) / len(groups[-1])
        else:
            groups.append([word])
            centers.append(word.center_y)

    char_widths = [w.box[2] / len(w.text) for w in ordered]
    median_cw = statistics.median(char_widths)

    lines = []
    per_line = []
    for group in groups:
        group = sorted(group, key=lambda w: (w.box[0], w.center_y, w.text))
        indent = int(group[0].box[0] // median_cw) if median_cw > 0 else 0
        lines.append(" " * indent + " ".join(w.text for w in group))
        per_line.append(group)
    return CodeSnapshot(t=t, lines=lines, words=per_line)
