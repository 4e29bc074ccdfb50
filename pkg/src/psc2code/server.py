"""Read-only HTTP view over a processed workspace.

Every payload is reproducible from the on-disk JSON artifacts; the service
adds no derivation beyond per-video keyword lookup. Video pixels are never
served: clients embed the original video and navigate by timestamp.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles

from .codelm import tokenize_line
from .search import EmptyQuery, SearchIndex, query as run_query, tokenize_query
from .workspace import Workspace


class WorkspaceView:
    """In-memory snapshot of workspace artifacts, reloadable on demand."""

    def __init__(self, root: str | Path, reload_per_request: bool = False):
        self.ws = Workspace(root)
        self.reload_per_request = reload_per_request
        self._lock = threading.Lock()
        self._snapshot: dict = {}
        self.rescan()

    def rescan(self) -> None:
        snapshot: dict = {"videos": {}, "index": None}
        for video_id in self.ws.video_ids():
            entry: dict = {"manifest": self.ws.read_json(video_id, "manifest.json")}
            for name in ("informative.json", "classified.json", "regions.json",
                         "workflow.json", "correction_report.json"):
                key = name.removesuffix(".json")
                entry[key] = self.ws.read_json(video_id, name) if self.ws.has(video_id, name) else None
            entry["code"] = {t: self.ws.read_code(video_id, t)
                             for t in self.ws.code_times(video_id)}
            snapshot["videos"][video_id] = entry
        index_path = self.ws.root / "index.json"
        if index_path.is_file():
            snapshot["index"] = SearchIndex.load(index_path)
        with self._lock:
            self._snapshot = snapshot

    def current(self) -> dict:
        if self.reload_per_request:
            self.rescan()
        with self._lock:
            return self._snapshot

    def video(self, video_id: str) -> dict:
        videos = self.current()["videos"]
        if video_id not in videos:
            raise HTTPException(status_code=404, detail=f"unknown video {video_id!r}")
        return videos[video_id]


def create_app(workspace: str | Path, app_dir: str | Path | None = None,
               reload_per_request: bool = False) -> FastAPI:
    view = WorkspaceView(workspace, reload_per_request)
    app = FastAPI(title="psc2code service", docs_url=None, redoc_url=None)

    @app.get("/videos")
    def videos() -> list[dict]:
        return [entry["manifest"] for entry in view.current()["videos"].values()]

    @app.get("/videos/{video_id}/frames")
    def frames(video_id: str) -> dict:
        entry = view.video(video_id)
        return {"informative": entry["informative"], "classified": entry["classified"]}

    @app.get("/videos/{video_id}/files")
    def files(video_id: str) -> list[dict]:
        entry = view.video(video_id)
        workflow = entry["workflow"] or {"clusters": []}
        return workflow["clusters"]

    @app.get("/videos/{video_id}/timeline")
    def timeline(video_id: str) -> list[dict]:
        entry = view.video(video_id)
        workflow = entry["workflow"] or {"timeline": []}
        return workflow["timeline"]

    @app.get("/videos/{video_id}/code/{t}")
    def code(video_id: str, t: int) -> dict:
        entry = view.video(video_id)
        if t not in entry["code"]:
            raise HTTPException(status_code=404, detail=f"no code snapshot at t={t}")
        return {"t": t, "lines": entry["code"][t]}

    @app.get("/videos/{video_id}/search")
    def video_search(video_id: str, q: str = Query(default="")) -> dict:
        entry = view.video(video_id)
        keywords = set(tokenize_query(q))
        if not keywords:
            raise HTTPException(status_code=400, detail="query has no tokens")
        hits = []
        for t in sorted(entry["code"]):
            tokens = {tok.text.lower()
                      for line in entry["code"][t] for tok in tokenize_line(line)}
            if keywords & tokens:
                hits.append(t)
        return {"video_id": video_id, "query": q, "frames": hits}

    @app.get("/search")
    def corpus_search(q: str = Query(default=""), k: int = Query(default=10)) -> dict:
        index = view.current()["index"]
        if index is None:
            raise HTTPException(status_code=404, detail="no index.json in workspace")
        try:
            hits = run_query(index, q, k)
        except EmptyQuery as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"query": q, "k": k, "hits": [h.to_dict() for h in hits]}

    if app_dir and Path(app_dir).is_dir():
        app.mount("/app", StaticFiles(directory=str(app_dir), html=True), name="app")

    return app
