"""OCR-error correction for reconstructed code snapshots.

Correction runs in three stages per video: normalization (gutter
line-number stripping, Unicode-to-ASCII folding), suspicion flagging
against the code language model plus the video's own recurring vocabulary,
and edit-distance repair. Repair candidates come from other frames of the
same video first and from the corpus model second; a candidate is accepted
only when its Levenshtein distance stays within a quarter of the longer
string. Suspects that no candidate explains are left untouched.

Snapshots keep their raw OCR word geometry; only the line text is rewritten.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .codelm import IDL, IDU, CodeLanguageModel, Token, line_structure, tokenize_line
from .ocr import CodeSnapshot

MECHANISMS = ("line_number_strip", "ascii_fold", "cross_frame_word",
              "cross_frame_line", "corpus_word")

_LEADING_NUMBER = re.compile(r"^\s*(\d+)[ \t]?")

# Lookalikes that survive NFKD decomposition unchanged.
_LOOKALIKES = {
    "‘": "'", "’": "'", "‚": "'", "‛": "'",
    "“": '"', "”": '"', "„": '"', "‟": '"',
    "‐": "-", "‑": "-", "‒": "-", "–": "-",
    "—": "-", "―": "-", "−": "-",
    " ": " ", " ": " ", " ": " ",
}


@dataclass(frozen=True)
class CorrectionConfig:
    k_word: int = 2
    k_line: int = 2
    accept_ratio: float = 0.25
    vocab_min_frames: int = 3

    def to_dict(self) -> dict:
        return {"k_word": self.k_word, "k_line": self.k_line,
                "accept_ratio": self.accept_ratio,
                "vocab_min_frames": self.vocab_min_frames}


@dataclass(frozen=True)
class CorrectionEntry:
    t: int
    line_no: int
    original: str
    corrected: str
    mechanism: str

    def __post_init__(self):
        if self.corrected == self.original:
            raise ValueError("entry without an actual change")
        if self.mechanism not in MECHANISMS:
            raise ValueError(f"unknown mechanism {self.mechanism!r}")

    def to_dict(self) -> dict:
        return {"t": self.t, "line_no": self.line_no, "original": self.original,
                "corrected": self.corrected, "mechanism": self.mechanism}


@dataclass
class CorrectionReport:
    entries: list[CorrectionEntry] = field(default_factory=list)
    words_checked: int = 0
    words_flagged: int = 0
    words_corrected: int = 0
    config: CorrectionConfig = field(default_factory=CorrectionConfig)

    def __post_init__(self):
        if not self.words_corrected <= self.words_flagged <= self.words_checked:
            raise ValueError("inconsistent correction counts")

    def to_dict(self) -> dict:
        return {"config": self.config.to_dict(),
                "entries": [e.to_dict() for e in self.entries],
                "words_checked": self.words_checked,
                "words_flagged": self.words_flagged,
                "words_corrected": self.words_corrected}


@dataclass
class LineFlags:
    tokens: list[Token]
    word_suspect: list[bool]
    line_suspect: bool


@dataclass
class SnapshotFlags:
    t: int
    lines: list[LineFlags]


def levenshtein(a: str, b: str, cap: int | None = None) -> int:
    """Edit distance; returns cap + 1 early when a cap is given and exceeded."""
    if a == b:
        return 0
    if cap is not None and abs(len(a) - len(b)) > cap:
        return cap + 1
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1,
                               previous[j - 1] + (ca != cb)))
        if cap is not None and min(current) > cap:
            return cap + 1
        previous = current
    return previous[-1]


def strip_line_numbers(snapshot: CodeSnapshot) -> CodeSnapshot:
    """Remove editor gutter numbers when the evidence is overwhelming.

    Requires at least 80% of nonempty lines to begin with an integer and the
    integers to be non-decreasing top to bottom; anything weaker leaves the
    snapshot untouched. Matching lines lose the number and one separator
    space, keeping code indentation that follows it.
    """
    nonempty = [line for line in snapshot.lines if line.strip()]
    if not nonempty:
        return snapshot
    leading = [_LEADING_NUMBER.match(line) for line in nonempty]
    numbered = [int(m.group(1)) for m in leading if m]
    if len(numbered) < 0.8 * len(nonempty):
        return snapshot
    if any(b < a for a, b in zip(numbered, numbered[1:])):
        return snapshot
    lines = [_LEADING_NUMBER.sub("", line, count=1) for line in snapshot.lines]
    return CodeSnapshot(t=snapshot.t, lines=lines, words=snapshot.words)


def fold_char(c: str) -> str:
    if c in _LOOKALIKES:
        return _LOOKALIKES[c]
    decomposed = unicodedata.normalize("NFKD", c)
    kept = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return kept if kept else c


def fold_ascii(snapshot: CodeSnapshot) -> CodeSnapshot:
    """Fold accented characters and typographic lookalikes to plain ASCII."""
    lines = ["".join(fold_char(c) for c in line) for line in snapshot.lines]
    return CodeSnapshot(t=snapshot.t, lines=lines, words=snapshot.words)


def video_vocabulary(snapshots: list[CodeSnapshot],
                     min_frames: int = 3) -> frozenset[str]:
    """Identifier texts that recur across enough distinct frames to trust."""
    seen_in: dict[str, set[int]] = defaultdict(set)
    for snap in snapshots:
        for line in snap.lines:
            for tok in tokenize_line(line):
                if tok.kind in (IDU, IDL):
                    seen_in[tok.text].add(snap.t)
    return frozenset(text for text, frames in seen_in.items()
                     if len(frames) >= min_frames)


def flag_suspects(snapshot: CodeSnapshot, model: CodeLanguageModel,
                  video_vocab: frozenset[str] = frozenset(),
                  cfg: CorrectionConfig = CorrectionConfig()) -> SnapshotFlags:
    """Mark improbable identifiers and improbable line structures.

    A word is suspect when it is identifier-shaped, rare in the corpus
    model, and not part of the video's recurring vocabulary. A line is
    suspect when its token-kind structure is rare in the model.
    """
    flags = []
    for line in snapshot.lines:
        tokens = tokenize_line(line)
        word_suspect = [
            tok.kind in (IDU, IDL)
            and model.count(tok.text) < cfg.k_word
            and tok.text not in video_vocab
            for tok in tokens
        ]
        line_suspect = bool(tokens) and (
            model.structure_count(line_structure(tokens)) < cfg.k_line)
        flags.append(LineFlags(tokens, word_suspect, line_suspect))
    return SnapshotFlags(t=snapshot.t, lines=flags)


def _ratio_ok(distance: int, a: str, b: str, ratio: float) -> bool:
    longest = max(len(a), len(b))
    return longest > 0 and distance / longest <= ratio


def _best_candidate(word: str, pool: Counter, ratio: float) -> str | None:
    """Closest pool entry within the acceptance ratio.

    Ties go to the more frequent candidate, then the lexicographically
    smaller one.
    """
    cap = max(1, int(ratio * (len(word) + max((len(c) for c in pool), default=0))))
    best: tuple[int, int, str] | None = None
    for candidate in pool:
        if candidate == word:
            continue
        d = levenshtein(word, candidate, cap=cap)
        if not _ratio_ok(d, word, candidate, ratio):
            continue
        key = (d, -pool[candidate], candidate)
        if best is None or key < best:
            best = key
    return best[2] if best else None


def _splice(line: str, replacements: list[tuple[Token, str]]) -> str:
    for tok, new_text in sorted(replacements, key=lambda r: r[0].start, reverse=True):
        line = line[:tok.start] + new_text + line[tok.start + len(tok.text):]
    return line


def correct_crossframe(
    snapshots: list[CodeSnapshot],
    flags: list[SnapshotFlags],
    model: CodeLanguageModel,
    cfg: CorrectionConfig = CorrectionConfig(),
) -> tuple[list[CodeSnapshot], CorrectionReport]:
    """Repair suspect lines and words using cross-frame and corpus evidence.

    Suspect lines are replaced wholesale by the closest trusted line of the
    video when one is similar enough; remaining suspect words are repaired
    individually, preferring candidates of the same identifier kind seen in
    other frames over corpus vocabulary. Non-suspect content never changes.
    """
    trusted_words: dict[str, Counter] = {IDU: Counter(), IDL: Counter()}
    trusted_lines: Counter = Counter()
    for snap, flag in zip(snapshots, flags):
        for line, line_flag in zip(snap.lines, flag.lines):
            for tok, suspect in zip(line_flag.tokens, line_flag.word_suspect):
                if tok.kind in (IDU, IDL) and not suspect:
                    trusted_words[tok.kind][tok.text] += 1
            if line_flag.tokens and not line_flag.line_suspect:
                trusted_lines[line.rstrip()] += 1

    corpus_words: dict[str, Counter] = {IDU: Counter(), IDL: Counter()}
    for text, count in model.unigram.items():
        if count < cfg.k_word:
            continue
        tokens = tokenize_line(text)
        if len(tokens) == 1 and tokens[0].kind in (IDU, IDL) and tokens[0].text == text:
            corpus_words[tokens[0].kind][text] = count

    entries: list[CorrectionEntry] = []
    checked = flagged = corrected = 0
    out: list[CodeSnapshot] = []
    for snap, flag in zip(snapshots, flags):
        new_lines = list(snap.lines)
        for line_no, (line, lf) in enumerate(zip(snap.lines, flag.lines)):
            checked += sum(1 for tok in lf.tokens if tok.kind in (IDU, IDL))
            n_flagged = sum(lf.word_suspect)
            flagged += n_flagged
            if lf.line_suspect:
                candidate = _best_candidate(line.rstrip(), trusted_lines, cfg.accept_ratio)
                if candidate is not None:
                    new_lines[line_no] = candidate
                    corrected += n_flagged
                    entries.append(CorrectionEntry(snap.t, line_no, line,
                                                   candidate, "cross_frame_line"))
                    continue
            if not n_flagged:
                continue
            replacements = []
            for tok, suspect in zip(lf.tokens, lf.word_suspect):
                if not suspect:
                    continue
                fixed = _best_candidate(tok.text, trusted_words[tok.kind], cfg.accept_ratio)
                mechanism = "cross_frame_word"
                if fixed is None:
                    fixed = _best_candidate(tok.text, corpus_words[tok.kind], cfg.accept_ratio)
                    mechanism = "corpus_word"
                if fixed is not None:
                    replacements.append((tok, fixed, mechanism))
            if replacements:
                new_line = _splice(line, [(tok, new) for tok, new, _ in replacements])
                corrected += len(replacements)
                mechanism = ("cross_frame_word"
                             if any(m == "cross_frame_word" for _, _, m in replacements)
                             else "corpus_word")
                entries.append(CorrectionEntry(snap.t, line_no, line, new_line, mechanism))
                new_lines[line_no] = new_line
        out.append(CodeSnapshot(t=snap.t, lines=new_lines, words=snap.words))
    report = CorrectionReport(entries=entries, words_checked=checked,
                              words_flagged=flagged, words_corrected=corrected,
                              config=cfg)
    return out, report


def _diff_entries(before: CodeSnapshot, after: CodeSnapshot,
                  mechanism: str) -> list[CorrectionEntry]:
    return [CorrectionEntry(before.t, i, old, new, mechanism)
            for i, (old, new) in enumerate(zip(before.lines, after.lines))
            if old != new]


def correct_video(
    snapshots: list[CodeSnapshot],
    model: CodeLanguageModel,
    cfg: CorrectionConfig = CorrectionConfig(),
) -> tuple[list[CodeSnapshot], CorrectionReport]:
    """Full per-video correction pass: normalize, flag, repair, report."""
    normalized = []
    norm_entries: list[CorrectionEntry] = []
    for snap in snapshots:
        stripped = strip_line_numbers(snap)
        norm_entries += _diff_entries(snap, stripped, "line_number_strip")
        folded = fold_ascii(stripped)
        norm_entries += _diff_entries(stripped, folded, "ascii_fold")
        normalized.append(folded)
    vocab = video_vocabulary(normalized, cfg.vocab_min_frames)
    flags = [flag_suspects(snap, model, vocab, cfg) for snap in normalized]
    corrected, report = correct_crossframe(normalized, flags, model, cfg)
    report.entries = norm_entries + report.entries
    return corrected, report
