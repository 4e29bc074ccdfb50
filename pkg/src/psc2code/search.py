"""TF-IDF search over per-video code documents.

Each video's corrected code becomes one document: token term frequencies
plus per-token postings of the frame times containing it. Matching is
case-insensitive, tokens are produced by the same lexer used everywhere
else, and tf-idf(t, d) = tf(t, d) * (ln(N / (1 + df(t))) + 1), a smoothed
variant that stays positive on small corpora.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .codelm import tokenize_line


class EmptyCorpus(ValueError):
    """No documents available to index."""


class EmptyQuery(ValueError):
    """The query contains no tokens."""


@dataclass
class VideoDocument:
    video_id: str
    tokens: dict[str, int] = field(default_factory=dict)
    frame_postings: dict[str, list[int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"video_id": self.video_id, "tokens": self.tokens,
                "frame_postings": self.frame_postings}

    @classmethod
    def from_dict(cls, d: dict) -> "VideoDocument":
        return cls(video_id=d["video_id"], tokens=dict(d["tokens"]),
                   frame_postings={t: [int(x) for x in v]
                                   for t, v in d["frame_postings"].items()})


@dataclass(frozen=True)
class SearchHit:
    video_id: str
    score: float
    matched_frames: tuple[int, ...]
    all_in_one_frame: bool

    def to_dict(self) -> dict:
        return {"video_id": self.video_id, "score": self.score,
                "matched_frames": list(self.matched_frames),
                "all_in_one_frame": self.all_in_one_frame}


def document_from_code(video_id: str, code_by_time: dict[int, str]) -> VideoDocument:
    """Build one document from a video's corrected code, keyed by frame time."""
    tf: Counter = Counter()
    postings: dict[str, set[int]] = defaultdict(set)
    for t, text in code_by_time.items():
        for line in text.splitlines():
            for tok in tokenize_line(line):
                word = tok.text.lower()
                tf[word] += 1
                postings[word].add(t)
    return VideoDocument(video_id=video_id, tokens=dict(tf),
                         frame_postings={w: sorted(ts) for w, ts in postings.items()})


@dataclass
class SearchIndex:
    documents: list[VideoDocument]
    df: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.df:
            self.df = self._count_df(self.documents)

    @staticmethod
    def _count_df(documents: list[VideoDocument]) -> dict[str, int]:
        df: Counter = Counter()
        for doc in documents:
            df.update(set(doc.tokens))
        return dict(df)

    @property
    def n(self) -> int:
        return len(self.documents)

    def idf(self, token: str) -> float:
        return math.log(self.n / (1 + self.df.get(token, 0))) + 1.0

    def tf_idf(self, token: str, doc: VideoDocument) -> float:
        tf = doc.tokens.get(token, 0)
        return tf * self.idf(token) if tf else 0.0

    def to_dict(self) -> dict:
        return {"n": self.n, "df": self.df,
                "documents": [d.to_dict() for d in self.documents]}

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def from_dict(cls, d: dict) -> "SearchIndex":
        return cls(documents=[VideoDocument.from_dict(x) for x in d["documents"]],
                   df={k: int(v) for k, v in d["df"].items()})

    @classmethod
    def load(cls, path: str | Path) -> "SearchIndex":
        return cls.from_dict(json.loads(Path(path).read_text()))


def build_index(documents: list[VideoDocument]) -> SearchIndex:
    if not documents:
        raise EmptyCorpus("no video documents to index")
    ordered = sorted(documents, key=lambda d: d.video_id)
    return SearchIndex(documents=ordered)


def tokenize_query(q: str) -> list[str]:
    """Unique lowercased query tokens, first-appearance order."""
    seen = []
    for tok in tokenize_line(q):
        word = tok.text.lower()
        if word not in seen:
            seen.append(word)
    return seen


def query(index: SearchIndex, q: str, k: int = 10) -> list[SearchHit]:
    """Rank videos by summed tf-idf of matched query tokens.

    Duplicate query tokens count once. Videos matching nothing are omitted;
    ties break by video id. ``all_in_one_frame`` reports whether some single
    frame contains every query token, the strict relevance criterion used
    for evaluation.
    """
    words = tokenize_query(q)
    if not words:
        raise EmptyQuery(f"no tokens in query {q!r}")
    hits = []
    for doc in index.documents:
        matched = [w for w in words if w in doc.tokens]
        if not matched:
            continue
        score = sum(index.tf_idf(w, doc) for w in matched)
        frames: set[int] = set()
        for w in matched:
            frames.update(doc.frame_postings[w])
        together: set[int] | None = None
        if len(matched) == len(words):
            together = set(doc.frame_postings[words[0]])
            for w in words[1:]:
                together &= set(doc.frame_postings[w])
        hits.append(SearchHit(video_id=doc.video_id, score=score,
                              matched_frames=tuple(sorted(frames)),
                              all_in_one_frame=bool(together)))
    hits.sort(key=lambda h: (-h.score, h.video_id))
    return hits[:max(0, k)]
