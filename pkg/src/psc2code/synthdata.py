"""Synthetic screencast fixtures: rendered IDE frames and OCR word layouts.

Everything here is deterministic given its arguments, so tests and demo
scripts can rebuild identical fixtures. Rendered frames use filled panels
with dark borders on a light desktop; panel gaps keep neighbouring borders
from fusing into longer lines than intended.
"""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np

from .frames import Frame, frame_from_color
from .layout import Rect
from .ocr import OcrWord

BACKGROUND = (235, 235, 235)
PANEL_FILL = (255, 255, 255)
BORDER = (40, 40, 40)
# Contrast kept under 150/8 so no glyph pixel crosses the edge detector's
# high threshold; long text runs would otherwise register as boundary lines.
TEXT = (237, 237, 237)
HIGHLIGHT_FILL = (150, 150, 255)

CHAR_W = 9
CHAR_H = 14
LINE_PITCH = 20
TEXT_X0 = 8
TEXT_Y0 = 8


@dataclass(frozen=True)
class IdeLayout:
    """Panel geometry of the mock IDE, all rects as (x, y, w, h)."""

    width: int
    height: int
    menu: Rect
    tree: Rect
    editor: Rect
    console: Rect


def ide_layout(width: int = 1280, height: int = 720) -> IdeLayout:
    # Gaps wider than the line-cluster epsilon keep neighbouring panel
    # borders from merging into one representative, and no two distinct
    # borders share an axis position, so none of them compete for the same
    # accumulator cell inside the probabilistic line transform.
    gap = 18
    menu_h = 40
    tree_w = 220
    console_h = 130
    console_inset = 40
    editor_x = gap + tree_w + gap
    editor_y = gap + menu_h + gap
    editor_w = width - editor_x - gap
    editor_h = height - editor_y - console_h - 3 * gap
    return IdeLayout(
        width=width, height=height,
        menu=Rect(gap, gap, width - 2 * gap, menu_h),
        tree=Rect(gap, editor_y, tree_w, height - editor_y - 2 * gap - 26),
        editor=Rect(editor_x, editor_y, editor_w, editor_h),
        console=Rect(editor_x + console_inset, editor_y + editor_h + gap,
                     editor_w - 2 * console_inset, console_h),
    )


def _panel(img: np.ndarray, rect: Rect) -> None:
    x, y, w, h = rect.x, rect.y, rect.w, rect.h
    cv2.rectangle(img, (x, y), (x + w, y + h), PANEL_FILL, -1)
    # 3 px borders survive the probabilistic line transform even when other
    # strong edges in the frame compete for accumulator votes.
    cv2.rectangle(img, (x, y), (x + w, y + h), BORDER, 3)


def _text(img: np.ndarray, text: str, x: int, y: int, scale: float = 1.1) -> None:
    cv2.putText(img, text, (x, y), cv2.FONT_HERSHEY_PLAIN, scale, TEXT, 1, cv2.LINE_AA)


def render_ide(code_lines: list[str], t: int = 0, width: int = 1280,
               height: int = 720, popup: bool = False,
               highlight_row: int | None = None,
               gutter: bool = True) -> tuple[Frame, Rect]:
    """Draw a mock IDE screenshot; returns the frame and the editor rect.

    The popup variant covers about 15% of the editor, strictly inside it.
    The highlight variant fills one code row edge to edge; its short side
    edges stay below the detector's minimum line length by design.
    """
    layout = ide_layout(width, height)
    img = np.full((height, width, 3), BACKGROUND, dtype=np.uint8)
    for rect in (layout.menu, layout.tree, layout.editor, layout.console):
        _panel(img, rect)

    _text(img, "File   Edit   Source   Run   Help", layout.menu.x + 14,
          layout.menu.y + 26, scale=1.2)
    for i, entry in enumerate(("project", "src", "Main.java", "Util.java", "lib")):
        _text(img, entry, layout.tree.x + 14 + (0 if i < 2 else 16),
              layout.tree.y + 30 + 24 * i)
    _text(img, "console output", layout.console.x + 14, layout.console.y + 28)

    ed = layout.editor
    if highlight_row is not None:
        y = ed.y + 12 + LINE_PITCH * highlight_row
        cv2.rectangle(img, (ed.x + 2, y), (ed.x + ed.w - 2, y + 16), HIGHLIGHT_FILL, -1)
    for row, line in enumerate(code_lines):
        y = ed.y + 26 + LINE_PITCH * row
        if y > ed.y + ed.h - 10:
            break
        if gutter:
            _text(img, str(row + 1), ed.x + 10, y, scale=1.0)
        _text(img, line, ed.x + 48, y)
    if popup:
        pw, ph = int(ed.w * 0.42), int(ed.h * 0.36)
        px, py = ed.x + int(ed.w * 0.30), ed.y + int(ed.h * 0.30)
        # Fill contrast high enough that a popup appearing between two
        # otherwise-identical frames clears the near-duplicate threshold.
        cv2.rectangle(img, (px, py), (px + pw, py + ph), (230, 230, 218), -1)
        cv2.rectangle(img, (px, py), (px + pw, py + ph), BORDER, 2)
        for i, suggestion in enumerate(("toString()", "hashCode()", "equals(Object)")):
            _text(img, suggestion, px + 12, py + 26 + 22 * i)
    return frame_from_color(t, img, origin="preextracted"), ed


def render_slide(title: str = "Lesson 3: Swing Basics", t: int = 0,
                 width: int = 1280, height: int = 720) -> Frame:
    """Full-screen slide with no sub-window structure at all."""
    img = np.zeros((height, width, 3), dtype=np.uint8)
    for row in range(height):
        shade = 150 + int(60 * row / height)
        img[row, :] = (shade, shade - 20, 90)
    cv2.putText(img, title, (80, height // 2), cv2.FONT_HERSHEY_PLAIN, 4.0,
                (255, 255, 255), 3, cv2.LINE_AA)
    return frame_from_color(t, img, origin="preextracted")


def render_blank(t: int = 0, width: int = 1280, height: int = 720,
                 shade: int = 128) -> Frame:
    return frame_from_color(t, np.full((height, width, 3), shade, dtype=np.uint8),
                            origin="preextracted")


def words_for_code(lines: list[str], char_w: int = CHAR_W, char_h: int = CHAR_H,
                   pitch: int = LINE_PITCH, x0: int = TEXT_X0,
                   y0: int = TEXT_Y0) -> list[OcrWord]:
    """Monospace OCR words for code lines, one box per whitespace-separated
    chunk. Geometry is exact, so reconstruction recovers lines and
    indentation verbatim."""
    words = []
    for row, line in enumerate(lines):
        col = 0
        y = y0 + pitch * row
        for chunk in line.split(" "):
            if chunk:
                words.append(OcrWord(chunk, (x0 + char_w * col, y,
                                             char_w * len(chunk), char_h)))
            col += len(chunk) + 1
    return words


def identifier_pool(count: int, rng: np.random.Generator,
                    min_distance: int = 3, upper: bool = False) -> list[str]:
    """Distinct identifiers pairwise at least ``min_distance`` edits apart."""
    from .correct import levenshtein

    letters = "abcdefghijklmnopqrstuvwxyz"
    pool: list[str] = []
    while len(pool) < count:
        length = int(rng.integers(8, 13))
        name = "".join(letters[rng.integers(0, 26)] for _ in range(length))
        if upper:
            name = name.capitalize()
        if all(levenshtein(name, other) >= min_distance for other in pool):
            pool.append(name)
    return pool
