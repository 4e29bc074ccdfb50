"""End-to-end pipeline: ingest, keyframes, classify, regions, OCR, correct,
workflow.

Every stage persists its artifact into the workspace and is skipped on
re-runs when the artifact already exists, so deleting a single file
recomputes exactly that stage. A stage failure is recorded in the video's
``errors.json`` and halts that video only.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .classify import ClassifierConfig, FrameVerdict, classify_frames
from .codelm import CodeLanguageModel
from .correct import CorrectionConfig, correct_video
from .frames import Frame, VideoManifest, probe_manifest, sample_frames
from .keyframes import DEFAULT_THRESHOLD, InformativeSet, filter_informative
from .layout import (BoundarySegment, LayoutConfig, LayoutCluster, LineCatalog,
                     Rect, SubWindow, cluster_layouts, cluster_segments,
                     detect_code_region, detect_segments)
from .ocr import (BackendUnavailable, CodeSnapshot, FixtureOcrBackend,
                  LocalOcrBackend, RemoteOcrBackend, ocr_region,
                  reconstruct_lines, words_from_json, words_to_json)
from .workspace import Workspace, open_workspace
from .workflow import build_timeline, cluster_files, workflow_to_dict

STAGES = ("ingest", "keyframes", "classify", "regions", "ocr", "correct", "workflow")


@dataclass(frozen=True)
class PipelineConfig:
    workspace: str
    model_path: str | None = None
    video_id: str | None = None
    decoder: str | None = None
    keyframe_threshold: float = DEFAULT_THRESHOLD
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    ocr_backend: str = "fixture"
    ocr_fixture_dir: str | None = None
    ocr_endpoint: str | None = None
    correction: CorrectionConfig = field(default_factory=CorrectionConfig)
    workflow_eps: float = 0.3

    def __post_init__(self):
        if self.ocr_backend not in ("fixture", "local", "remote"):
            raise ValueError(f"unknown OCR backend {self.ocr_backend!r}")
        if not 0 < self.keyframe_threshold < 1:
            raise ValueError(f"keyframe threshold {self.keyframe_threshold} outside (0, 1)")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["classifier"]["fixture_labels"] = (
            str(self.classifier.fixture_labels) if self.classifier.fixture_labels else None)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        layout = LayoutConfig(**d.pop("layout", {}))
        classifier_d = d.pop("classifier", {})
        classifier_d.pop("layout", None)
        classifier = ClassifierConfig(layout=layout, **classifier_d)
        correction = CorrectionConfig(**d.pop("correction", {}))
        return cls(layout=layout, classifier=classifier, correction=correction, **d)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _load_frame(ws: Workspace, video_id: str, t: int) -> Frame:
    return ws.read_frame(video_id, t)


def _ingest(ws: Workspace, video_id: str, source: str | Path,
            cfg: PipelineConfig) -> VideoManifest:
    if ws.has(video_id, "manifest.json") and ws.frame_times(video_id):
        return ws.read_manifest(video_id)
    manifest = probe_manifest(video_id, source, decoder=cfg.decoder)
    frames = sample_frames(manifest, decoder=cfg.decoder)
    ws.write_manifest(manifest)
    for frame in frames:
        ws.write_frame(video_id, frame)
    return manifest


def _keyframes(ws: Workspace, video_id: str, cfg: PipelineConfig) -> InformativeSet:
    if ws.has(video_id, "informative.json"):
        return InformativeSet.from_dict(ws.read_json(video_id, "informative.json"))
    frames = [_load_frame(ws, video_id, t) for t in ws.frame_times(video_id)]
    info = filter_informative(frames, threshold=cfg.keyframe_threshold)
    ws.write_json(video_id, "informative.json", info.to_dict())
    return info


def _classify(ws: Workspace, video_id: str, kept: list[int],
              cfg: PipelineConfig) -> list[FrameVerdict]:
    if ws.has(video_id, "classified.json"):
        stored = ws.read_json(video_id, "classified.json")
        return [FrameVerdict.from_dict(v) for v in stored["verdicts"]]
    frames = [_load_frame(ws, video_id, t) for t in kept]
    verdicts = classify_frames(frames, cfg.classifier)
    ws.write_json(video_id, "classified.json",
                  {"verdicts": [v.to_dict() for v in verdicts]})
    return verdicts


def _regions(ws: Workspace, video_id: str, valid_times: list[int],
             cfg: PipelineConfig) -> list[LayoutCluster]:
    if ws.has(video_id, "regions.json"):
        stored = ws.read_json(video_id, "regions.json")
        clusters = []
        for c in stored["clusters"]:
            cluster = LayoutCluster(
                cluster_id=int(c["cluster_id"]),
                members=[int(t) for t in c["members"]],
                majority=LineCatalog([BoundarySegment.from_dict(s) for s in c["majority"]]),
                subwindows=[SubWindow(rect=Rect(*r)) for r in c["subwindows"]],
                code_region=Rect(*c["code_region"]) if c["code_region"] else None)
            clusters.append(cluster)
        return clusters

    frame_lines = {}
    dims = None
    for t in valid_times:
        frame = _load_frame(ws, video_id, t)
        height, width = frame.gray.shape
        dims = (width, height)
        frame_lines[t] = cluster_segments(
            detect_segments(frame, cfg.layout),
            cfg.layout.cluster_eps_px, cfg.layout.overlap_min).lines
    clusters = cluster_layouts(frame_lines, cfg.layout)
    for cluster in clusters:
        subwindows, region = detect_code_region(cluster.majority, dims, cfg.layout)
        cluster.subwindows = subwindows
        cluster.code_region = region
    ws.write_json(video_id, "regions.json", {"clusters": [
        {"cluster_id": c.cluster_id,
         "members": c.members,
         "majority": [s.to_dict() for s in c.majority.lines],
         "subwindows": [sw.rect.to_list() for sw in c.subwindows],
         "code_region": c.code_region.to_list() if c.code_region else None}
        for c in clusters]})
    return clusters


def _make_ocr_backend(ws: Workspace, video_id: str, cfg: PipelineConfig):
    if cfg.ocr_backend == "fixture":
        directory = cfg.ocr_fixture_dir or ws.path(video_id, "ocr")
        return FixtureOcrBackend(directory)
    if cfg.ocr_backend == "local":
        return LocalOcrBackend()
    return RemoteOcrBackend(endpoint=cfg.ocr_endpoint)


def _ocr(ws: Workspace, video_id: str, valid_times: list[int],
         clusters: list[LayoutCluster], cfg: PipelineConfig) -> dict[int, str]:
    """Populate ocr/<t>.json cache-first; returns per-frame error messages."""
    region_of = {}
    for cluster in clusters:
        for t in cluster.members:
            region_of[t] = cluster.code_region
    backend = _make_ocr_backend(ws, video_id, cfg)
    errors = {}
    for t in valid_times:
        if ws.has(video_id, f"ocr/{t}.json"):
            continue
        region = region_of.get(t)
        if region is None:
            continue
        frame = _load_frame(ws, video_id, t)
        try:
            words = ocr_region(frame, region, backend)
        except BackendUnavailable as exc:
            errors[t] = str(exc)
            continue
        ws.write_json(video_id, f"ocr/{t}.json", words_to_json(words))
    return errors


def _correct(ws: Workspace, video_id: str, valid_times: list[int],
             cfg: PipelineConfig) -> list[CodeSnapshot]:
    def load_snapshots() -> list[CodeSnapshot]:
        snaps = []
        for t in valid_times:
            if not ws.has(video_id, f"ocr/{t}.json"):
                continue
            words = words_from_json(ws.read_json(video_id, f"ocr/{t}.json"))
            snaps.append(reconstruct_lines(words, t=t))
        return snaps

    def write_document(snaps: list[CodeSnapshot]) -> None:
        blocks = ["\n".join(s.lines) for s in snaps]
        ws.path(video_id, "document.txt").write_text(
            "\n\n".join(blocks) + "\n" if blocks else "", encoding="utf-8")

    if ws.has(video_id, "correction_report.json"):
        cached = [CodeSnapshot(t=t, lines=ws.read_code(video_id, t), words=[])
                  for t in ws.code_times(video_id)]
        if not ws.has(video_id, "document.txt"):
            write_document(cached)
        return cached

    snapshots = load_snapshots()
    if cfg.model_path:
        model = CodeLanguageModel.load(cfg.model_path)
    else:
        model = CodeLanguageModel(unigram={}, structures={})
    corrected, report = correct_video(snapshots, model, cfg.correction)
    for snap in corrected:
        ws.write_code(video_id, snap.t, snap.lines)
    write_document(corrected)
    ws.write_json(video_id, "correction_report.json", report.to_dict())
    return corrected


def _workflow(ws: Workspace, video_id: str, snapshots: list[CodeSnapshot],
              cfg: PipelineConfig) -> dict:
    if ws.has(video_id, "workflow.json"):
        return ws.read_json(video_id, "workflow.json")
    if snapshots:
        clusters = cluster_files(snapshots, eps=cfg.workflow_eps)
        timeline = build_timeline(snapshots, clusters)
        payload = workflow_to_dict(clusters, timeline)
    else:
        payload = {"clusters": [], "timeline": []}
    ws.write_json(video_id, "workflow.json", payload)
    return payload


def run_pipeline(source: str | Path, cfg: PipelineConfig) -> dict:
    """Process one video source into workspace artifacts.

    Returns a summary naming each stage's disposition (computed or cached),
    per-stage wall time, and any recorded errors.
    """
    ws = open_workspace(cfg.workspace)
    video_id = cfg.video_id or Path(str(source)).stem
    ws.video_dir(video_id, create=True)
    summary: dict = {"video_id": video_id, "stages": {}, "timings": {}, "errors": {}}

    def staged(name: str, artifact_exists: bool, fn):
        begin = time.monotonic()
        summary["stages"][name] = "cached" if artifact_exists else "computed"
        result = fn()
        summary["timings"][name] = round(time.monotonic() - begin, 4)
        return result

    try:
        staged("ingest",
               ws.has(video_id, "manifest.json") and bool(ws.frame_times(video_id)),
               lambda: _ingest(ws, video_id, source, cfg))
        info = staged("keyframes", ws.has(video_id, "informative.json"),
                      lambda: _keyframes(ws, video_id, cfg))
        verdicts = staged("classify", ws.has(video_id, "classified.json"),
                          lambda: _classify(ws, video_id, info.kept, cfg))
        valid_times = [v.t for v in verdicts if v.valid]
        clusters = staged("regions", ws.has(video_id, "regions.json"),
                          lambda: _regions(ws, video_id, valid_times, cfg))
        ocr_cached = all(ws.has(video_id, f"ocr/{t}.json") for t in valid_times)
        summary["errors"]["ocr"] = staged(
            "ocr", ocr_cached and bool(valid_times),
            lambda: _ocr(ws, video_id, valid_times, clusters, cfg))
        snapshots = staged("correct", ws.has(video_id, "correction_report.json"),
                           lambda: _correct(ws, video_id, valid_times, cfg))
        staged("workflow", ws.has(video_id, "workflow.json"),
               lambda: _workflow(ws, video_id, snapshots, cfg))
    except Exception as exc:
        failed = next((s for s in STAGES if s not in summary["timings"]), "unknown")
        summary["errors"][failed] = str(exc)
        ws.write_json(video_id, "errors.json",
                      {"stage": failed, "error": str(exc)})
        summary["failed"] = failed
        cfg.save(Path(cfg.workspace) / "config.json")
        return summary

    if not summary["errors"].get("ocr"):
        summary["errors"].pop("ocr", None)
    cfg.save(Path(cfg.workspace) / "config.json")
    return summary
