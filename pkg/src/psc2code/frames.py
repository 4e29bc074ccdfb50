"""Video ingestion: sample one frame per second from a video or a frame directory.

Videos are decoded by an external binary (ffmpeg by default, see
``PSC2CODE_DECODER``); the toolkit never links a codec. A directory of
PNGs named ``<second>.png`` is accepted as a first-class source so the
whole pipeline runs without any decoder installed.
"""

from __future__ import annotations

import json
import os
import re
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

DECODER_ENV = "PSC2CODE_DECODER"
DEFAULT_DECODER = "ffmpeg"

# Rec. 601 luma weights, fixed for reproducibility.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class SourceUnreadable(Exception):
    """The video file or frame directory is missing or cannot be decoded."""


class DecoderUnavailable(Exception):
    """The external decoder binary is not on PATH."""


@dataclass(frozen=True)
class VideoManifest:
    """Identity and basic metadata of one video."""

    video_id: str
    source: str
    duration_s: int
    resolution: tuple[int, int]
    title: str = ""

    def __post_init__(self):
        if self.duration_s < 1:
            raise ValueError(f"duration_s must be >= 1, got {self.duration_s}")
        w, h = self.resolution
        if w < 1 or h < 1:
            raise ValueError(f"resolution must be positive, got {self.resolution}")

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "source": self.source,
            "duration_s": self.duration_s,
            "resolution": list(self.resolution),
            "title": self.title,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VideoManifest":
        return cls(
            video_id=d["video_id"],
            source=d["source"],
            duration_s=int(d["duration_s"]),
            resolution=(int(d["resolution"][0]), int(d["resolution"][1])),
            title=d.get("title", ""),
        )


@dataclass(frozen=True)
class Frame:
    """One sampled frame: second offset plus grayscale and color rasters.

    ``gray`` is uint8 HxW, ``color`` is uint8 HxWx3 (RGB); both always have
    identical spatial dimensions. Frames are immutable and safe to share.
    """

    t: int
    gray: np.ndarray = field(repr=False)
    color: np.ndarray = field(repr=False)
    origin: str = "decoded"  # "decoded" | "preextracted"

    def __post_init__(self):
        if self.gray.shape != self.color.shape[:2]:
            raise ValueError("gray and color dimensions differ")

    @property
    def size(self) -> tuple[int, int]:
        """(width, height) in pixels."""
        h, w = self.gray.shape
        return w, h


def to_gray(color: np.ndarray) -> np.ndarray:
    """Rec. 601 luma of an RGB uint8 raster, rounded to nearest integer."""
    r, g, b = LUMA_WEIGHTS
    luma = r * color[..., 0].astype(np.float64) + g * color[..., 1] + b * color[..., 2]
    return np.clip(np.rint(luma), 0, 255).astype(np.uint8)


def frame_from_color(t: int, color: np.ndarray, origin: str = "decoded") -> Frame:
    return Frame(t=t, gray=to_gray(color), color=np.ascontiguousarray(color), origin=origin)


def load_frame_png(path: str | Path, t: int, origin: str = "preextracted") -> Frame:
    bgr = cv2.imread(str(path), cv2.IMREAD_COLOR)
    if bgr is None:
        raise SourceUnreadable(f"cannot read image: {path}")
    return frame_from_color(t, cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB), origin=origin)


def save_frame_png(frame: Frame, path: str | Path) -> None:
    cv2.imwrite(str(path), cv2.cvtColor(frame.color, cv2.COLOR_RGB2BGR))


_FRAME_NAME = re.compile(r"^(\d+)\.png$")


def decoder_binary(override: str | None = None) -> str:
    return override or os.environ.get(DECODER_ENV) or DEFAULT_DECODER


def sample_frames(manifest: VideoManifest, decoder: str | None = None) -> list[Frame]:
    """One Frame per second of the source, ascending by t.

    A directory source is read as pre-extracted frames named ``<t>.png``;
    a file source is decoded at 1 fps (first frame of each second) via the
    external decoder. Raises SourceUnreadable / DecoderUnavailable; either
    aborts this video only.
    """
    src = Path(manifest.source)
    if src.is_dir():
        return _frames_from_directory(src)
    if not src.exists():
        raise SourceUnreadable(f"source does not exist: {src}")
    return _frames_from_video(src, decoder_binary(decoder))


def _frames_from_directory(src: Path) -> list[Frame]:
    times = []
    for name in os.listdir(src):
        m = _FRAME_NAME.match(name)
        if m:
            times.append(int(m.group(1)))
    if not times:
        raise SourceUnreadable(f"no <t>.png frames in {src}")
    return [load_frame_png(src / f"{t}.png", t) for t in sorted(times)]


def _frames_from_video(src: Path, decoder: str) -> list[Frame]:
    if shutil.which(decoder) is None:
        raise DecoderUnavailable(f"decoder not on PATH: {decoder}")
    with tempfile.TemporaryDirectory(prefix="psc2code-decode-") as tmp:
        # fps=1 with round=up keeps the first frame of each wall-clock second.
        cmd = [
            decoder,
            "-hide_banner",
            "-loglevel", "error",
            "-i", str(src),
            "-vf", "fps=1:round=up",
            "-start_number", "0",
            os.path.join(tmp, "%d.png"),
        ]
        proc = subprocess.run(cmd, capture_output=True, text=True)
        if proc.returncode != 0:
            raise SourceUnreadable(f"decode failed for {src}: {proc.stderr.strip()[:300]}")
        frames = []
        for name in sorted(os.listdir(tmp), key=lambda n: int(n.split(".")[0])):
            t = int(name.split(".")[0])
            frame = load_frame_png(Path(tmp) / name, t, origin="decoded")
            frames.append(frame)
        if not frames:
            raise SourceUnreadable(f"decoder produced no frames for {src}")
        return frames


def probe_manifest(video_id: str, source: str | Path, title: str = "",
                   decoder: str | None = None) -> VideoManifest:
    """Build a manifest for a source, probing duration/resolution.

    For a frame directory the duration is the largest frame time + 1 and the
    resolution is read from the first frame.
    """
    src = Path(source)
    if src.is_dir():
        frames = _frames_from_directory(src)
        w, h = frames[0].size
        return VideoManifest(video_id=video_id, source=str(src),
                             duration_s=frames[-1].t + 1, resolution=(w, h), title=title)
    binary = decoder_binary(decoder)
    probe = shutil.which("ffprobe") if binary == "ffmpeg" else None
    if probe is None:
        raise DecoderUnavailable("cannot probe video metadata without ffprobe")
    cmd = [
        probe, "-v", "error",
        "-select_streams", "v:0",
        "-show_entries", "stream=width,height:format=duration",
        "-of", "json", str(src),
    ]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise SourceUnreadable(f"probe failed: {proc.stderr.strip()[:300]}")
    meta = json.loads(proc.stdout)
    stream = meta["streams"][0]
    duration = max(1, int(float(meta["format"]["duration"])))
    return VideoManifest(video_id=video_id, source=str(src), duration_s=duration,
                         resolution=(int(stream["width"]), int(stream["height"])), title=title)
