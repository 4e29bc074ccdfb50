"""Command-line entry points: process videos, build models, index, search,
evaluate, and serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classify import ClassifierConfig
from .codelm import build_model
from .metrics import MissingTotalRelevant, QueryJudgment, retrieval_metrics
from .pipeline import PipelineConfig, run_pipeline
from .search import (EmptyCorpus, EmptyQuery, SearchIndex, build_index,
                     document_from_code, query)
from .workspace import open_workspace


def _classifier_config(args: argparse.Namespace, video_dir: Path) -> ClassifierConfig:
    labels = args.labels
    if args.classifier == "fixture" and labels is None:
        labels = video_dir / "labels.json"
    return ClassifierConfig(backend=args.classifier, endpoint=args.classifier_endpoint,
                            fixture_labels=labels)


def cmd_process(args: argparse.Namespace) -> int:
    base = PipelineConfig.load(args.config) if args.config else None
    failures = 0
    for source in args.sources:
        video_id = args.video_id if (args.video_id and len(args.sources) == 1) \
            else Path(source).stem
        video_dir = Path(args.workspace) / video_id
        if base is not None:
            import dataclasses
            cfg = dataclasses.replace(base, workspace=str(args.workspace),
                                      video_id=video_id)
        else:
            cfg = PipelineConfig(
                workspace=str(args.workspace),
                model_path=args.model,
                video_id=video_id,
                decoder=args.decoder,
                keyframe_threshold=args.keyframe_threshold,
                classifier=_classifier_config(args, video_dir),
                ocr_backend=args.ocr,
                ocr_fixture_dir=args.ocr_fixtures,
                ocr_endpoint=args.ocr_endpoint,
            )
        summary = run_pipeline(source, cfg)
        status = f"FAILED at {summary['failed']}" if "failed" in summary else "ok"
        stages = " ".join(f"{s}:{d}" for s, d in summary["stages"].items())
        print(f"{video_id}: {status} [{stages}]")
        for stage, err in summary["errors"].items():
            print(f"  {stage}: {err}", file=sys.stderr)
        if "failed" in summary:
            failures += 1
    return 1 if failures else 0


def cmd_build_model(args: argparse.Namespace) -> int:
    model = build_model(args.corpus, pattern=args.pattern)
    model.save(args.out)
    print(f"model: {model.corpus_files} files, {model.vocab_size} tokens, "
          f"{len(model.structures)} line structures -> {args.out}")
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    ws = open_workspace(args.workspace)
    documents = []
    for video_id in ws.video_ids():
        code = {t: "\n".join(ws.read_code(video_id, t)) for t in ws.code_times(video_id)}
        if code:
            documents.append(document_from_code(video_id, code))
    try:
        index = build_index(documents)
    except EmptyCorpus as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = args.out or (Path(args.workspace) / "index.json")
    index.save(out)
    print(f"index: {index.n} videos -> {out}")
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    index = SearchIndex.load(args.index)
    try:
        hits = query(index, args.query, args.top)
    except EmptyQuery as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps([h.to_dict() for h in hits], indent=2))
        return 0
    if not hits:
        print("no results")
        return 0
    for rank, hit in enumerate(hits, start=1):
        frames = ",".join(str(t) for t in hit.matched_frames)
        marker = " [all-in-one-frame]" if hit.all_in_one_frame else ""
        print(f"{rank:2d}. {hit.video_id}  score={hit.score:.4f}  t={frames}{marker}")
    return 0


def _load_judgments(path: str) -> list[tuple[str, QueryJudgment]]:
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ValueError("judgments file must map query name to an entry")
    out = []
    for name in sorted(raw):
        entry = raw[name]
        if isinstance(entry, dict):
            out.append((name, QueryJudgment.of(entry["relevance"],
                                               entry.get("total_relevant"))))
        else:
            out.append((name, QueryJudgment.of(entry)))
    return out


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        named = _load_judgments(args.judgments)
        result = retrieval_metrics([j for _, j in named], args.k)
    except MissingTotalRelevant as exc:
        print(f"error: {exc} (judgment entries need a total_relevant field)",
              file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        payload = dict(result)
        payload["queries"] = [name for name, _ in named]
        print(json.dumps(payload, indent=2))
        return 0
    width = max(len(name) for name, _ in named)
    for (name, _), p in zip(named, result["precision_at_k"]):
        print(f"{name:<{width}}  P@{args.k} = {p:.4f}")
    print(f"{'mean':<{width}}  P@{args.k} = {result['mean_precision_at_k']:.4f}")
    print(f"{'MAP':<{width}}  @{args.k}  = {result['map_at_k']:.4f}")
    print(f"{'MRR':<{width}}  @{args.k}  = {result['mrr_at_k']:.4f}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(args.workspace, app_dir=args.app_dir,
                     reload_per_request=args.reload)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psc2code",
        description="Extract, denoise, correct, and search source code "
                    "from programming screencasts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("process", help="run the full pipeline on video sources")
    p.add_argument("sources", nargs="+", help="video files or frame directories")
    p.add_argument("--workspace", required=True)
    p.add_argument("--config", help="PipelineConfig JSON; overrides other flags")
    p.add_argument("--video-id", help="explicit id (single source only)")
    p.add_argument("--model", help="model.json for correction")
    p.add_argument("--decoder", help="decoder binary (default: $PSC2CODE_DECODER or ffmpeg)")
    p.add_argument("--keyframe-threshold", type=float, default=0.05)
    p.add_argument("--classifier", choices=["heuristic", "external", "fixture"],
                   default="heuristic")
    p.add_argument("--classifier-endpoint")
    p.add_argument("--labels", help="fixture label file (default <video>/labels.json)")
    p.add_argument("--ocr", choices=["fixture", "local", "remote"], default="fixture")
    p.add_argument("--ocr-endpoint")
    p.add_argument("--ocr-fixtures", help="directory of recorded OCR responses")
    p.set_defaults(func=cmd_process)

    p = sub.add_parser("build-model", help="build the code language model from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--pattern", default="**/*.java")
    p.set_defaults(func=cmd_build_model)

    p = sub.add_parser("index", help="build the TF-IDF index over a workspace")
    p.add_argument("--workspace", required=True)
    p.add_argument("--out", help="output path (default <workspace>/index.json)")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="query a built index")
    p.add_argument("--index", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="retrieval metrics from a judgment file")
    p.add_argument("--judgments", required=True,
                   help='JSON: {query: {"relevance": [0,1,...], "total_relevant": n}}')
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="serve workspace artifacts over HTTP")
    p.add_argument("--workspace", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--app-dir", help="static player UI to mount at /app")
    p.add_argument("--reload", action="store_true",
                   help="re-scan the workspace on every request")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
