"""Deterministic demo screencast: ten rendered frames plus OCR and label fixtures.

The generated video follows a short editing session: a title slide, three
successive edits to Main.java, a completion popup, two edits to Util.java,
a switch back to Main.java, and a final return to Util.java. Frame 8
repeats frame 7 pixel for pixel so the near-duplicate filter has something
to drop, and the OCR words for frame 3 misread one identifier so
cross-frame correction has something to repair. Everything derives from
the tables below, so tests can assert pipeline output against facts known
by construction.
"""

from __future__ import annotations

import json
from pathlib import Path

from .classify import ClassifierConfig
from .codelm import build_model
from .frames import save_frame_png
from .ocr import words_to_json
from .pipeline import PipelineConfig
from .synthdata import render_ide, render_slide, words_for_code

DEMO_VIDEO_ID = "demo01"

MAIN_V1 = [
    "public class Main {",
    "    private JButton button;",
    "    public Main() {",
    '        button = new JButton("Run");',
    "        button.addItemListener(this);",
    "    }",
    "}",
]
MAIN_V2 = MAIN_V1[:5] + ["        button.setEnabled(true);"] + MAIN_V1[5:]
MAIN_V3 = MAIN_V2[:6] + ["        panel.add(button);"] + MAIN_V2[6:]

UTIL_V1 = [
    "public class Util {",
    "    public static int clamp(int value, int lo, int hi) {",
    "        return Math.max(lo, Math.min(hi, value));",
    "    }",
    "}",
]
UTIL_V2 = UTIL_V1[:1] + ["    public static int total = 0;"] + UTIL_V1[1:]

MISREAD_LINE = 4
MISREAD_WRONG = "addItemLiftener"
MISREAD_RIGHT = "addItemListener"

# (t, code or None for the slide, highlight row, popup, valid). Highlight
# rows move with every edit (the caret line) and stay two apart, so the
# band edges of different frames never fuse into one persistent line.
SCHEDULE = [
    (0, None, None, False, False),
    (1, MAIN_V1, 1, False, True),
    (2, MAIN_V2, 3, False, True),
    (3, MAIN_V3, 5, False, True),
    (4, MAIN_V3, 5, True, False),
    (5, UTIL_V1, 1, False, True),
    (6, UTIL_V2, 3, False, True),
    (7, MAIN_V3, 7, False, True),
    (8, MAIN_V3, 7, False, True),
    (9, UTIL_V2, 9, False, True),
]


def _corpus_sources() -> dict[str, str]:
    # Final file states twice over, so every demo identifier and line shape
    # reaches the language model's trust thresholds.
    return {
        "a/Main.java": "\n".join(MAIN_V3) + "\n",
        "a/Util.java": "\n".join(UTIL_V2) + "\n",
        "b/Main.java": "\n".join(MAIN_V3) + "\n",
        "b/Util.java": "\n".join(UTIL_V2) + "\n",
    }


def demo_frame(t: int):
    """Render the frame for second ``t``; returns (frame, editor rect or None)."""
    _, code, row, popup, _ = SCHEDULE[t]
    if code is None:
        return render_slide(t=t), None
    frame, editor = render_ide(code, t=t, highlight_row=row, popup=popup)
    return frame, editor


def build_demo(root: str | Path) -> dict:
    """Materialize the demo video under ``root``; returns expected facts.

    Writes ``sources/demo01/<t>.png`` (the pre-extracted video),
    ``ocr_fixtures/demo01/<t>.json``, ``labels/demo01.json``, a four-file
    Java corpus with its ``model.json``, and returns a ready-to-run
    pipeline configuration targeting ``<root>/ws``.
    """
    root = Path(root)
    source_dir = root / "sources" / DEMO_VIDEO_ID
    ocr_dir = root / "ocr_fixtures" / DEMO_VIDEO_ID
    labels_path = root / "labels" / f"{DEMO_VIDEO_ID}.json"
    corpus_dir = root / "corpus"
    model_path = root / "model.json"
    for d in (source_dir, ocr_dir, labels_path.parent):
        d.mkdir(parents=True, exist_ok=True)

    editor = None
    for t, _, _, _, _ in SCHEDULE:
        frame, ed = demo_frame(t)
        editor = ed or editor
        save_frame_png(frame, source_dir / f"{t}.png")

    labels = {str(t): valid for t, _, _, _, valid in SCHEDULE}
    labels_path.write_text(json.dumps(labels, indent=2, sort_keys=True) + "\n")

    for t, code, _, popup, valid in SCHEDULE:
        if not valid or code is None:
            continue
        lines = list(code)
        if t == 3:
            lines[MISREAD_LINE] = lines[MISREAD_LINE].replace(MISREAD_RIGHT, MISREAD_WRONG)
        payload = words_to_json(words_for_code(lines))
        (ocr_dir / f"{t}.json").write_text(json.dumps(payload, indent=2) + "\n")

    for rel, text in _corpus_sources().items():
        path = corpus_dir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    build_model(corpus_dir).save(model_path)

    config = PipelineConfig(
        workspace=str(root / "ws"),
        model_path=str(model_path),
        video_id=DEMO_VIDEO_ID,
        classifier=ClassifierConfig(backend="fixture", fixture_labels=str(labels_path)),
        ocr_backend="fixture",
        ocr_fixture_dir=str(ocr_dir),
    )
    return {
        "video_id": DEMO_VIDEO_ID,
        "source": str(source_dir),
        "config": config,
        "kept": [0, 1, 2, 3, 4, 5, 6, 7, 9],
        "dropped": [(8, 7)],
        "valid": [1, 2, 3, 5, 6, 7, 9],
        "invalid": [0, 4],
        "editor": editor,
        "file_names": ["Main", "Util"],
        "members": {"Main": [1, 2, 3, 7], "Util": [5, 6, 9]},
        "edits_at": [2, 3, 6],
        "switches_at": [5, 7, 9],
        "misread": {"t": 3, "line_no": MISREAD_LINE,
                    "wrong": MISREAD_WRONG, "right": MISREAD_RIGHT},
        "final_code": {"Main": MAIN_V3, "Util": UTIL_V2},
    }
