"""Workflow reconstruction: file clustering and the edit/switch timeline.

Frames whose code lines mostly coincide belong to the same file; the
dissimilarity between two snapshots is one minus the longest common line
subsequence over the longer line count. Each file cluster accumulates a
best-effort cumulative content per member frame, and adjacent valid frames
produce timeline actions: an edit with a line diff inside one file, or a
switch between files.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .codelm import IDU, KEYWORD, tokenize_line
from .dbscan import dbscan, groups
from .ocr import CodeSnapshot

EQ = "eq"
INS = "ins"
DEL = "del"


def line_lcs(a: list[str], b: list[str]) -> int:
    """Length of the longest common subsequence of exact-matching lines."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for line_a in a:
        cur = [0]
        for j, line_b in enumerate(b, start=1):
            if line_a == line_b:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def line_diff(a: list[str], b: list[str]) -> list[tuple[str, str]]:
    """LCS-based line diff as ordered (op, line) pairs.

    Replaying the ops (keep eq and ins lines, drop del lines) reproduces
    ``b`` exactly; keeping eq and del lines reproduces ``a``.
    """
    n, m = len(a), len(b)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                dp[i][j] = dp[i + 1][j + 1] + 1
            else:
                dp[i][j] = max(dp[i + 1][j], dp[i][j + 1])
    ops = []
    i = j = 0
    while i < n and j < m:
        if a[i] == b[j]:
            ops.append((EQ, a[i]))
            i += 1
            j += 1
        elif dp[i + 1][j] >= dp[i][j + 1]:
            ops.append((DEL, a[i]))
            i += 1
        else:
            ops.append((INS, b[j]))
            j += 1
    ops.extend((DEL, line) for line in a[i:])
    ops.extend((INS, line) for line in b[j:])
    return ops


def frame_dissimilarity(a: CodeSnapshot, b: CodeSnapshot) -> float:
    """1 - LCS(a, b) / max(LOC); 0 when both snapshots are empty."""
    longest = max(len(a.lines), len(b.lines))
    if longest == 0:
        return 0.0
    return 1.0 - line_lcs(a.lines, b.lines) / longest


@dataclass
class FileCluster:
    file_id: int
    name: str
    member_frames: list[int]
    content_by_time: dict[int, list[str]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"file_id": self.file_id, "name": self.name,
                "member_frames": self.member_frames,
                "content_by_time": {str(t): lines
                                    for t, lines in self.content_by_time.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "FileCluster":
        return cls(file_id=int(d["file_id"]), name=d["name"],
                   member_frames=[int(t) for t in d["member_frames"]],
                   content_by_time={int(t): list(lines)
                                    for t, lines in d["content_by_time"].items()})


@dataclass
class TimelineAction:
    t: int
    kind: str
    file_id: int | None = None
    from_file: int | None = None
    to_file: int | None = None
    inserted: int = 0
    deleted: int = 0
    diff: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        d: dict = {"t": self.t, "kind": self.kind}
        if self.kind == "edit":
            d["file_id"] = self.file_id
            d["summary"] = [self.inserted, self.deleted]
            d["diff"] = [[op, line] for op, line in self.diff]
        else:
            d["from_file"] = self.from_file
            d["to_file"] = self.to_file
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TimelineAction":
        if d["kind"] == "edit":
            return cls(t=int(d["t"]), kind="edit", file_id=int(d["file_id"]),
                       inserted=int(d["summary"][0]), deleted=int(d["summary"][1]),
                       diff=[(op, line) for op, line in d["diff"]])
        return cls(t=int(d["t"]), kind="switch",
                   from_file=int(d["from_file"]), to_file=int(d["to_file"]))


def _class_name(lines: list[str]) -> Counter:
    names: Counter = Counter()
    for line in lines:
        tokens = tokenize_line(line)
        for prev, cur in zip(tokens, tokens[1:]):
            if prev.kind == KEYWORD and prev.text == "class" and cur.kind == IDU:
                names[cur.text] += 1
    return names


def merge_content(accumulated: list[str], new: list[str]) -> list[str]:
    """Union-by-position merge of a newer snapshot into accumulated content.

    Where the diff pairs old lines against new ones, the newer side wins
    (the developer edited those lines). Old lines with no paired replacement
    are kept: they usually scrolled out of view rather than disappearing.
    """
    merged = []
    pending_del: list[str] = []
    pending_ins: list[str] = []

    def flush():
        if pending_ins:
            merged.extend(pending_ins)
        else:
            merged.extend(pending_del)
        pending_del.clear()
        pending_ins.clear()

    for op, line in line_diff(accumulated, new):
        if op == EQ:
            flush()
            merged.append(line)
        elif op == DEL:
            pending_del.append(line)
        else:
            pending_ins.append(line)
    flush()
    return merged


def cluster_files(snapshots: list[CodeSnapshot], eps: float = 0.3) -> list[FileCluster]:
    """Group snapshots into files and accumulate per-frame file content.

    Density clustering with a single-member floor keeps briefly shown files
    alive. A cluster is named by the most frequent ``class X`` declaration
    among its lines, disambiguated when two clusters claim the same class,
    and falls back to a positional file name.
    """
    if not snapshots:
        raise ValueError("no snapshots to cluster")
    ordered = sorted(snapshots, key=lambda s: s.t)
    labels = dbscan(ordered, frame_dissimilarity, eps=eps, min_pts=1)
    clusters = []
    used_names: set[str] = set()
    for file_id, member_idxs in enumerate(groups(labels)):
        members = [ordered[i] for i in member_idxs]
        names: Counter = Counter()
        for snap in members:
            names.update(_class_name(snap.lines))
        if names:
            best = min(names.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        else:
            best = f"file{file_id + 1}"
        name = best
        suffix = 2
        while name in used_names:
            name = f"{best}#{suffix}"
            suffix += 1
        used_names.add(name)

        content: list[str] = []
        content_by_time = {}
        for snap in members:
            content = merge_content(content, snap.lines)
            content_by_time[snap.t] = list(content)
        clusters.append(FileCluster(file_id=file_id, name=name,
                                    member_frames=[s.t for s in members],
                                    content_by_time=content_by_time))
    return clusters


def build_timeline(snapshots: list[CodeSnapshot],
                   clusters: list[FileCluster]) -> list[TimelineAction]:
    """Edit/switch actions between adjacent snapshots, ascending by time."""
    owner = {t: c.file_id for c in clusters for t in c.member_frames}
    ordered = sorted(snapshots, key=lambda s: s.t)
    actions = []
    for prev, cur in zip(ordered, ordered[1:]):
        if owner[prev.t] != owner[cur.t]:
            actions.append(TimelineAction(t=cur.t, kind="switch",
                                          from_file=owner[prev.t],
                                          to_file=owner[cur.t]))
        elif prev.lines != cur.lines:
            diff = line_diff(prev.lines, cur.lines)
            actions.append(TimelineAction(
                t=cur.t, kind="edit", file_id=owner[cur.t],
                inserted=sum(1 for op, _ in diff if op == INS),
                deleted=sum(1 for op, _ in diff if op == DEL),
                diff=diff))
    return actions


def workflow_to_dict(clusters: list[FileCluster],
                     timeline: list[TimelineAction]) -> dict:
    return {"clusters": [c.to_dict() for c in clusters],
            "timeline": [a.to_dict() for a in timeline]}


def workflow_from_dict(d: dict) -> tuple[list[FileCluster], list[TimelineAction]]:
    return ([FileCluster.from_dict(c) for c in d["clusters"]],
            [TimelineAction.from_dict(a) for a in d["timeline"]])
