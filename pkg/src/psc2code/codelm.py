"""Statistical code models backing OCR correction.

A longest-match Java lexer feeds two count models learned from a source
corpus: a unigram model over token texts and a line-structure model over
per-line token-kind patterns. Identifier tokens keep their case class (IDU
starts uppercase, IDL starts lowercase or underscore) because correction
candidates must preserve it.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

KEYWORD = "KEYWORD"
IDU = "IDU"
IDL = "IDL"
NUM = "NUM"
STR = "STR"
CHAR = "CHAR"
PUNCT = "PUNCT"

# Java SE 8 reserved words. true/false/null are literals, not keywords,
# and therefore lex as IDL.
JAVA_KEYWORDS = frozenset("""
abstract assert boolean break byte case catch char class const continue
default do double else enum extends final finally float for goto if
implements import instanceof int interface long native new package private
protected public return short static strictfp super switch synchronized this
throw throws transient try void volatile while
""".split())

# Multi-character operators, longest first so prefixes never shadow them.
MULTI_PUNCT = sorted(
    [">>>=", ">>>", ">>=", "<<=", ">>", "<<", "<=", ">=", "==", "!=",
     "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=",
     "^=", "->", "::"],
    key=len, reverse=True)

_IDENT = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_NUMBER = re.compile(
    r"0[xX][0-9a-fA-F_]+[lL]?|0[bB][01_]+[lL]?"
    r"|\d[\d_]*(?:\.[\d_]*)?(?:[eE][+-]?\d+)?[fFdDlL]?")


@dataclass(frozen=True)
class Token:
    text: str
    kind: str
    start: int = field(default=-1, compare=False)

    def atom(self) -> str:
        """Pattern atom: literal text for keywords/punctuation, else the kind."""
        return self.text if self.kind in (KEYWORD, PUNCT) else self.kind


@dataclass(frozen=True)
class LineStructure:
    atoms: tuple[str, ...]

    @property
    def pattern(self) -> str:
        return " ".join(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)


def _ident_kind(text: str) -> str:
    if text in JAVA_KEYWORDS:
        return KEYWORD
    return IDU if text[0].isupper() else IDL


def _lex_quoted(line: str, pos: int, quote: str) -> tuple[str, str, int]:
    """Consume a quoted literal; unterminated literals run to end of line."""
    i = pos + 1
    while i < len(line):
        c = line[i]
        if c == "\\" and i + 1 < len(line):
            i += 2
            continue
        if c == quote:
            kind = STR if quote == '"' else CHAR
            return line[pos:i + 1], kind, i + 1
        i += 1
    return line[pos:], STR, len(line)


def tokenize_line(line: str) -> list[Token]:
    """Longest-match lexing; any byte sequence tokenizes without error."""
    tokens = []
    i = 0
    n = len(line)
    while i < n:
        c = line[i]
        if c.isspace():
            i += 1
            continue
        if c in "\"'":
            text, kind, i = _lex_quoted(line, i, c)
            tokens.append(Token(text, kind, i - len(text)))
            continue
        m = _NUMBER.match(line, i)
        if m:
            tokens.append(Token(m.group(), NUM, i))
            i = m.end()
            continue
        m = _IDENT.match(line, i)
        if m:
            tokens.append(Token(m.group(), _ident_kind(m.group()), i))
            i = m.end()
            continue
        for op in MULTI_PUNCT:
            if line.startswith(op, i):
                tokens.append(Token(op, PUNCT, i))
                i += len(op)
                break
        else:
            tokens.append(Token(c, PUNCT, i))
            i += 1
    return tokens


def line_structure(tokens: list[Token]) -> LineStructure:
    return LineStructure(tuple(t.atom() for t in tokens))


class EmptyCorpus(ValueError):
    """No source files found under the corpus root."""


@dataclass
class CodeLanguageModel:
    unigram: dict[str, int]
    structures: dict[str, int]
    vocab_size: int = 0
    corpus_files: int = 0

    def __post_init__(self):
        if not self.vocab_size:
            self.vocab_size = len(self.unigram)

    def count(self, token_text: str) -> int:
        return self.unigram.get(token_text, 0)

    def structure_count(self, pattern: str | LineStructure) -> int:
        key = pattern.pattern if isinstance(pattern, LineStructure) else pattern
        return self.structures.get(key, 0)

    def to_dict(self) -> dict:
        return {"unigram": self.unigram, "structures": self.structures,
                "vocab_size": self.vocab_size, "corpus_files": self.corpus_files}

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def from_dict(cls, d: dict) -> "CodeLanguageModel":
        return cls(unigram=dict(d["unigram"]), structures=dict(d["structures"]),
                   vocab_size=int(d.get("vocab_size", 0)),
                   corpus_files=int(d.get("corpus_files", 0)))

    @classmethod
    def load(cls, path: str | Path) -> "CodeLanguageModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def strip_comments(source: str) -> str:
    """Blank out // and /* */ comments, leaving string contents and newlines."""
    out = list(source)
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c in "\"'":
            quote = c
            i += 1
            while i < n and source[i] != "\n":
                if source[i] == "\\":
                    i += 2
                    continue
                if source[i] == quote:
                    i += 1
                    break
                i += 1
            continue
        if c == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                out[i] = " "
                i += 1
            continue
        if c == "/" and i + 1 < n and source[i + 1] == "*":
            while i < n and not (source[i] == "*" and i + 1 < n and source[i + 1] == "/"):
                if source[i] != "\n":
                    out[i] = " "
                i += 1
            if i < n:
                out[i] = out[i + 1] = " "
                i += 2
            continue
        i += 1
    return "".join(out)


def _count_file(path: Path) -> tuple[Counter, Counter]:
    unigram: Counter = Counter()
    structures: Counter = Counter()
    text = strip_comments(path.read_text(errors="replace"))
    for line in text.splitlines():
        tokens = tokenize_line(line)
        if not tokens:
            continue
        unigram.update(t.text for t in tokens)
        structures[line_structure(tokens).pattern] += 1
    return unigram, structures


def build_model(corpus_root: str | Path, pattern: str = "**/*.java",
                workers: int = 4) -> CodeLanguageModel:
    """Count tokens and line structures over every source file under a root.

    Counting is per file and merged by summation, so the result does not
    depend on file order.
    """
    files = sorted(Path(corpus_root).glob(pattern))
    if not files:
        raise EmptyCorpus(f"no files matching {pattern!r} under {corpus_root}")
    unigram: Counter = Counter()
    structures: Counter = Counter()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for file_unigram, file_structures in pool.map(_count_file, files):
            unigram.update(file_unigram)
            structures.update(file_structures)
    return CodeLanguageModel(unigram=dict(unigram), structures=dict(structures),
                             vocab_size=len(unigram), corpus_files=len(files))
