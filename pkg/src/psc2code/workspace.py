"""On-disk artifact workspace: one directory per processed video.

Layout per video id::

    <root>/<video_id>/
        manifest.json       video metadata
        frames/<t>.png      sampled frames
        informative.json    near-duplicate filtering result
        classified.json     frame verdicts
        regions.json        layout clusters + code regions
        ocr/<t>.json        positioned OCR words (also the remote cache)
        code/<t>.txt        reconstructed (then corrected) code lines
        document.txt        aggregated corrected code
        workflow.json       file clusters + action timeline
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from .frames import Frame, VideoManifest, load_frame_png, save_frame_png


class Workspace:
    """Maps video ids to artifact directories under one root.

    Writes for a given video id are serialized through a per-id lock;
    reads are lock-free over immutable files.
    """

    def __init__(self, root: str | Path):
        root = Path(root)
        if root.exists() and not root.is_dir():
            raise PermissionError(f"workspace root is not a directory: {root}")
        root.mkdir(parents=True, exist_ok=True)
        self.root = root
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, video_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(video_id, threading.Lock())

    def video_ids(self) -> list[str]:
        ids = []
        for name in sorted(os.listdir(self.root)):
            if (self.root / name / "manifest.json").exists():
                ids.append(name)
        return ids

    def video_dir(self, video_id: str, create: bool = False) -> Path:
        d = self.root / video_id
        if create:
            d.mkdir(parents=True, exist_ok=True)
            (d / "frames").mkdir(exist_ok=True)
            (d / "ocr").mkdir(exist_ok=True)
            (d / "code").mkdir(exist_ok=True)
        return d

    # -- json helpers ---------------------------------------------------

    def path(self, video_id: str, *parts: str) -> Path:
        return self.video_dir(video_id).joinpath(*parts)

    def write_json(self, video_id: str, name: str, payload) -> Path:
        p = self.path(video_id, name)
        p.parent.mkdir(parents=True, exist_ok=True)
        with self.lock(video_id):
            p.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return p

    def read_json(self, video_id: str, name: str):
        return json.loads(self.path(video_id, name).read_text(encoding="utf-8"))

    def has(self, video_id: str, name: str) -> bool:
        return self.path(video_id, name).exists()

    # -- typed artifacts ------------------------------------------------

    def write_manifest(self, manifest: VideoManifest) -> None:
        self.video_dir(manifest.video_id, create=True)
        self.write_json(manifest.video_id, "manifest.json", manifest.to_dict())

    def read_manifest(self, video_id: str) -> VideoManifest:
        return VideoManifest.from_dict(self.read_json(video_id, "manifest.json"))

    def write_frame(self, video_id: str, frame: Frame) -> None:
        save_frame_png(frame, self.path(video_id, "frames", f"{frame.t}.png"))

    def frame_times(self, video_id: str) -> list[int]:
        d = self.path(video_id, "frames")
        if not d.is_dir():
            return []
        return sorted(int(p.stem) for p in d.glob("*.png"))

    def read_frame(self, video_id: str, t: int) -> Frame:
        return load_frame_png(self.path(video_id, "frames", f"{t}.png"), t)

    def write_code(self, video_id: str, t: int, lines: list[str]) -> None:
        p = self.path(video_id, "code", f"{t}.txt")
        with self.lock(video_id):
            p.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    def read_code(self, video_id: str, t: int) -> list[str]:
        text = self.path(video_id, "code", f"{t}.txt").read_text(encoding="utf-8")
        return text.splitlines()

    def code_times(self, video_id: str) -> list[int]:
        d = self.path(video_id, "code")
        if not d.is_dir():
            return []
        return sorted(int(p.stem) for p in d.glob("*.txt"))


def open_workspace(root: str | Path) -> Workspace:
    """Open (creating if needed) a workspace rooted at ``root``."""
    return Workspace(root)
