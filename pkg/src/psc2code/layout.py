"""Sub-window boundary detection and code-region cropping.

Per frame, axis-aligned boundary segments come from a Canny edge map fed
through a probabilistic Hough transform. Two denoising passes follow:
close-by parallel segments are merged by density clustering (keeping the
longest member as representative), and frames are clustered by which
catalog lines they contain so that lines absent from the majority of a
layout cluster (code highlights, transient scrollbars) are discarded.
Sub-windows are then the minimal axis-aligned rectangles bounded by the
surviving lines plus the frame borders; the largest one is presumed to
be the code editor.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import cv2
import numpy as np

from .dbscan import dbscan, groups
from .frames import Frame

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


@dataclass(frozen=True)
class LayoutConfig:
    canny_lo: float = 50.0
    canny_hi: float = 150.0
    canny_aperture: int = 3
    hough_threshold: int = 50
    hough_max_gap: int = 5
    min_line_px: int = 60
    angle_tol_deg: float = 2.0
    cluster_eps_px: float = 10.0
    overlap_min: float = 0.3
    layout_eps: float = 0.2
    span_slack_px: float = 10.0
    min_region_frac: float = 0.10
    min_rect_px: int = 8


@dataclass(frozen=True, order=True)
class BoundarySegment:
    """Axis-aligned segment: perpendicular position plus span along the line."""

    orientation: str
    position: int
    span: tuple[int, int]

    def __post_init__(self):
        if self.span[1] <= self.span[0]:
            raise ValueError(f"empty span {self.span}")

    @property
    def length(self) -> int:
        return self.span[1] - self.span[0]

    def to_dict(self) -> dict:
        return {"orientation": self.orientation, "position": self.position,
                "span": list(self.span)}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundarySegment":
        return cls(d["orientation"], int(d["position"]),
                   (int(d["span"][0]), int(d["span"][1])))


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h

    def to_list(self) -> list[int]:
        return [self.x, self.y, self.w, self.h]

    def overlaps(self, other: "Rect") -> bool:
        """True when interiors intersect (shared edges do not count)."""
        return (self.x < other.x + other.w and other.x < self.x + self.w
                and self.y < other.y + other.h and other.y < self.y + self.h)

    def contains_strictly(self, other: "Rect", margin: float = 0.0) -> bool:
        return (other.x > self.x + margin and other.y > self.y + margin
                and other.x + other.w < self.x + self.w - margin
                and other.y + other.h < self.y + self.h - margin)


@dataclass
class LineCatalog:
    """Ordered representative lines: horizontals by position, then verticals."""

    lines: list[BoundarySegment]

    def __len__(self) -> int:
        return len(self.lines)

    def horizontals(self) -> list[BoundarySegment]:
        return [s for s in self.lines if s.orientation == HORIZONTAL]

    def verticals(self) -> list[BoundarySegment]:
        return [s for s in self.lines if s.orientation == VERTICAL]


@dataclass
class SubWindow:
    rect: Rect
    is_code: bool = False
    layout_cluster: int = 0


@dataclass
class LayoutCluster:
    """One window layout: member frames plus their majority line catalog."""

    cluster_id: int
    members: list[int]
    majority: LineCatalog
    subwindows: list[SubWindow] = field(default_factory=list)
    code_region: Rect | None = None


def detect_segments(frame: Frame, cfg: LayoutConfig = LayoutConfig()) -> list[BoundarySegment]:
    """Axis-aligned boundary candidates of one frame, shortest first discarded.

    Hough segments within ``angle_tol_deg`` of horizontal/vertical are snapped
    to the axis; anything shorter than ``min_line_px`` is dropped.
    """
    edges = cv2.Canny(frame.gray, cfg.canny_lo, cfg.canny_hi, apertureSize=cfg.canny_aperture)
    raw = cv2.HoughLinesP(edges, rho=1.0, theta=np.pi / 180.0,
                          threshold=cfg.hough_threshold,
                          minLineLength=cfg.min_line_px,
                          maxLineGap=cfg.hough_max_gap)
    if raw is None:
        return []
    segments = []
    for x1, y1, x2, y2 in raw.reshape(-1, 4).tolist():
        dx, dy = x2 - x1, y2 - y1
        angle = abs(np.degrees(np.arctan2(dy, dx))) % 180.0
        if min(angle, 180.0 - angle) <= cfg.angle_tol_deg:
            seg = BoundarySegment(HORIZONTAL, int(round((y1 + y2) / 2)),
                                  (min(x1, x2), max(x1, x2)))
        elif abs(angle - 90.0) <= cfg.angle_tol_deg:
            seg = BoundarySegment(VERTICAL, int(round((x1 + x2) / 2)),
                                  (min(y1, y2), max(y1, y2)))
        else:
            continue
        if seg.length >= cfg.min_line_px:
            segments.append(seg)
    return sorted(segments)


def span_overlap(a: tuple[int, int], b: tuple[int, int]) -> int:
    return max(0, min(a[1], b[1]) - max(a[0], b[0]))


def segment_distance(a: BoundarySegment, b: BoundarySegment, overlap_min: float) -> float:
    """Positional distance, gated to +inf unless the spans overlap enough."""
    if a.orientation != b.orientation:
        return float("inf")
    if span_overlap(a.span, b.span) < overlap_min * min(a.length, b.length):
        return float("inf")
    return float(abs(a.position - b.position))


def _representative(members: list[BoundarySegment]) -> BoundarySegment:
    # Longest member wins; ties resolved by position then span start.
    return max(members, key=lambda s: (s.length, -s.position, -s.span[0]))


def cluster_segments_with_assignment(
    segments: list[BoundarySegment],
    eps_px: float = 10.0,
    overlap_min: float = 0.3,
) -> tuple[LineCatalog, list[int]]:
    """Merge close-by parallel segments; every input maps to one representative.

    Returns the catalog (sorted: horizontals by position, then verticals) and
    for each input segment the index of its representative in the catalog.
    """
    reps: list[BoundarySegment] = []
    assignment = [-1] * len(segments)
    for orientation in (HORIZONTAL, VERTICAL):
        idxs = [i for i, s in enumerate(segments) if s.orientation == orientation]
        subset = [segments[i] for i in idxs]
        labels = dbscan(subset, lambda a, b: segment_distance(a, b, overlap_min),
                        eps=eps_px, min_pts=1)
        for member_idxs in groups(labels):
            rep = _representative([subset[i] for i in member_idxs])
            rep_idx = len(reps)
            reps.append(rep)
            for i in member_idxs:
                assignment[idxs[i]] = rep_idx
    order = sorted(range(len(reps)),
                   key=lambda i: (reps[i].orientation != HORIZONTAL,
                                  reps[i].position, reps[i].span))
    remap = {old: new for new, old in enumerate(order)}
    catalog = LineCatalog([reps[i] for i in order])
    return catalog, [remap[a] for a in assignment]


def cluster_segments(segments: list[BoundarySegment],
                     eps_px: float = 10.0, overlap_min: float = 0.3) -> LineCatalog:
    catalog, _ = cluster_segments_with_assignment(segments, eps_px, overlap_min)
    return catalog


def line_vector(frame_segments: list[BoundarySegment], catalog: LineCatalog,
                eps_px: float = 10.0, overlap_min: float = 0.3) -> list[bool]:
    """Presence bit per catalog line: does this frame carry a segment of it?"""
    bits = [False] * len(catalog)
    for seg in frame_segments:
        best, best_d = None, float("inf")
        for idx, rep in enumerate(catalog.lines):
            d = segment_distance(seg, rep, overlap_min)
            if d < best_d:
                best, best_d = idx, d
        if best is not None and best_d <= eps_px:
            bits[best] = True
    return bits


def hamming_fraction(a: list[bool], b: list[bool]) -> float:
    if not a:
        return 0.0
    return sum(x != y for x, y in zip(a, b)) / len(a)


def cluster_layouts(frame_lines: dict[int, list[BoundarySegment]],
                    cfg: LayoutConfig = LayoutConfig()) -> list[LayoutCluster]:
    """Group frames by window layout and keep each group's majority lines.

    ``frame_lines`` maps frame time to that frame's clustered segments. The
    shared catalog is rebuilt from the union of all per-frame lines; frames
    whose presence vectors differ in at most ``layout_eps`` of catalog
    positions end up in one cluster, and a cluster retains only lines present
    in strictly more than half of its member frames.
    """
    times = sorted(frame_lines)
    union: list[BoundarySegment] = []
    owners: list[int] = []
    for t in times:
        for seg in frame_lines[t]:
            union.append(seg)
            owners.append(t)
    catalog, assignment = cluster_segments_with_assignment(
        union, cfg.cluster_eps_px, cfg.overlap_min)

    vectors: dict[int, list[bool]] = {t: [False] * len(catalog) for t in times}
    for owner, rep_idx in zip(owners, assignment):
        vectors[owner][rep_idx] = True

    labels = dbscan([vectors[t] for t in times], hamming_fraction,
                    eps=cfg.layout_eps, min_pts=1)
    clusters = []
    for cluster_id, member_idxs in enumerate(groups(labels)):
        members = [times[i] for i in member_idxs]
        majority = []
        for idx, rep in enumerate(catalog.lines):
            presence = sum(vectors[t][idx] for t in members)
            if presence > 0.5 * len(members):
                majority.append(rep)
        clusters.append(LayoutCluster(cluster_id=cluster_id, members=members,
                                      majority=LineCatalog(majority)))
    return clusters


def _border_lines(width: int, height: int) -> list[BoundarySegment]:
    return [
        BoundarySegment(HORIZONTAL, 0, (0, width)),
        BoundarySegment(HORIZONTAL, height, (0, width)),
        BoundarySegment(VERTICAL, 0, (0, height)),
        BoundarySegment(VERTICAL, width, (0, height)),
    ]


def _spans_interval(seg: BoundarySegment, lo: float, hi: float, slack: float) -> bool:
    return seg.span[0] <= lo + slack and seg.span[1] >= hi - slack


def enumerate_rectangles(catalog: LineCatalog, frame_dims: tuple[int, int],
                         cfg: LayoutConfig = LayoutConfig()) -> list[Rect]:
    """All axis-aligned rectangles whose four bounding lines mutually span them.

    The frame borders participate as implicit lines, so an empty catalog
    yields exactly the full-frame rectangle. A line bounds a rectangle side
    only if its span covers the rectangle extent within ``span_slack_px``.
    """
    width, height = frame_dims
    lines = list(catalog.lines) + _border_lines(width, height)
    hs = sorted((s for s in lines if s.orientation == HORIZONTAL),
                key=lambda s: (s.position, s.span))
    vs = sorted((s for s in lines if s.orientation == VERTICAL),
                key=lambda s: (s.position, s.span))
    slack = cfg.span_slack_px
    rects = []
    seen = set()
    for ti in range(len(hs)):
        for bi in range(len(hs)):
            top, bottom = hs[ti], hs[bi]
            if bottom.position - top.position < cfg.min_rect_px:
                continue
            for li in range(len(vs)):
                for ri in range(len(vs)):
                    left, right = vs[li], vs[ri]
                    if right.position - left.position < cfg.min_rect_px:
                        continue
                    x0, x1 = left.position, right.position
                    y0, y1 = top.position, bottom.position
                    if not (_spans_interval(top, x0, x1, slack)
                            and _spans_interval(bottom, x0, x1, slack)
                            and _spans_interval(left, y0, y1, slack)
                            and _spans_interval(right, y0, y1, slack)):
                        continue
                    rect = Rect(x0, y0, x1 - x0, y1 - y0)
                    if (rect.x, rect.y, rect.w, rect.h) not in seen:
                        seen.add((rect.x, rect.y, rect.w, rect.h))
                        rects.append(rect)
    return sorted(rects, key=lambda r: (r.area, r.x, r.y, r.w, r.h))


def detect_code_region(majority: LineCatalog, frame_dims: tuple[int, int],
                       cfg: LayoutConfig = LayoutConfig()) -> tuple[list[SubWindow], Rect | None]:
    """Resolve candidate rectangles into sub-windows and pick the code region.

    Overlapping candidates are resolved smallest-first, so a nested inner
    rectangle displaces its outer container. The largest surviving rectangle
    becomes the code region when it covers at least ``min_region_frac`` of
    the frame; otherwise no region is reported.
    """
    width, height = frame_dims
    kept: list[Rect] = []
    for rect in enumerate_rectangles(majority, frame_dims, cfg):
        if not any(rect.overlaps(k) for k in kept):
            kept.append(rect)
    subwindows = [SubWindow(rect=r) for r in kept]
    if not kept:
        return subwindows, None
    largest = max(kept, key=lambda r: (r.area, -r.x, -r.y))
    if largest.area < cfg.min_region_frac * width * height:
        return subwindows, None
    for sw in subwindows:
        sw.is_code = sw.rect == largest
    return subwindows, largest
