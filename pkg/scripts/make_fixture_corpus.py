#!/usr/bin/env python3
"""Generate the committed Java fixture corpus under tests/fixtures/corpus.

Fifty deterministic files assembled from small vocabularies, comment-free
on purpose: token counting oracles in the tests can then lex the raw files
without replicating comment stripping. Re-running the script reproduces
the corpus byte for byte; pass --check to verify instead of writing.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

SEED = 20240811
FILE_COUNT = 50

PACKAGES = ["app.core", "app.model", "app.io", "app.view", "app.event"]
IMPORTS = [
    "java.util.List",
    "java.util.Map",
    "java.util.ArrayList",
    "java.io.File",
    "javax.swing.JButton",
    "javax.swing.JFrame",
    "java.awt.event.ItemEvent",
]
NOUNS = ["Order", "Item", "Cart", "User", "Event", "Panel", "Frame", "Store",
         "Config", "Report"]
ROLES = ["Service", "Handler", "Builder", "Manager", "View", "Loader"]
FIELD_TYPES = ["int", "long", "double", "boolean", "String"]
FIELD_NAMES = ["count", "total", "label", "name", "value", "index", "size",
               "enabled", "limit", "offset"]
PARAM_NAMES = ["value", "input", "amount", "flag", "text"]
VERBS = ["get", "set", "load", "save", "update", "reset", "apply", "render"]
LITERALS = ['"ok"', '"error"', '"name"', '"total"', "0", "1", "10", "100",
            "0.5", "true", "false", "null"]


def _class_name(rng: random.Random) -> str:
    return rng.choice(NOUNS) + rng.choice(ROLES)


def _field(rng: random.Random) -> str:
    return f"    private {rng.choice(FIELD_TYPES)} {rng.choice(FIELD_NAMES)};"


def _getter(rng: random.Random) -> list[str]:
    typ = rng.choice(FIELD_TYPES)
    name = rng.choice(FIELD_NAMES)
    return [
        f"    public {typ} {VERBS[0]}{name.capitalize()}() {{",
        f"        return {name};",
        "    }",
    ]


def _setter(rng: random.Random) -> list[str]:
    typ = rng.choice(FIELD_TYPES)
    name = rng.choice(FIELD_NAMES)
    return [
        f"    public void {VERBS[1]}{name.capitalize()}({typ} {name}) {{",
        f"        this.{name} = {name};",
        "    }",
    ]


def _worker(rng: random.Random) -> list[str]:
    verb = rng.choice(VERBS[2:])
    noun = rng.choice(NOUNS)
    param = rng.choice(PARAM_NAMES)
    acc = rng.choice(FIELD_NAMES)
    lit = rng.choice(LITERALS)
    body = [
        f"    public int {verb}{noun}(int {param}) {{",
        f"        int {acc} = 0;",
        f"        for (int i = 0; i < {param}; i++) {{",
        f"            {acc} = {acc} + i;",
        "        }",
        f"        if ({acc} > {rng.choice(['10', '100'])}) {{",
        f"            System.out.println({lit});",
        "        }",
        f"        return {acc};",
        "    }",
    ]
    return body


def _constructor(rng: random.Random, cls: str) -> list[str]:
    widget = rng.choice(["JButton", "JFrame", "ArrayList"])
    name = rng.choice(FIELD_NAMES)
    return [
        f"    public {cls}() {{",
        f"        {name} = new {widget}();",
        f"        {name}.addItemListener(this);" if widget == "JButton"
        else f"        this.{name} = {name};",
        "    }",
    ]


def render_file(rng: random.Random, index: int) -> tuple[str, str]:
    cls = f"{_class_name(rng)}{index:02d}"
    lines = [f"package {rng.choice(PACKAGES)};", ""]
    for imp in sorted(rng.sample(IMPORTS, rng.randint(1, 3))):
        lines.append(f"import {imp};")
    lines += ["", f"public class {cls} {{"]
    for _ in range(rng.randint(1, 3)):
        lines.append(_field(rng))
    lines.append("")
    lines += _constructor(rng, cls)
    for block in rng.sample([_getter, _setter, _worker], rng.randint(2, 3)):
        lines.append("")
        lines += block(rng)
    lines.append("}")
    return cls, "\n".join(lines) + "\n"


def generate() -> dict[str, str]:
    rng = random.Random(SEED)
    files: dict[str, str] = {}
    for i in range(FILE_COUNT):
        cls, text = render_file(rng, i)
        files[f"{cls}.java"] = text
    return files


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent
                                             / "tests" / "fixtures" / "corpus"))
    parser.add_argument("--check", action="store_true",
                        help="verify the corpus on disk matches the generator")
    args = parser.parse_args(argv)
    out = Path(args.out)
    files = generate()
    if args.check:
        stale = [name for name, text in files.items()
                 if not (out / name).exists() or (out / name).read_text() != text]
        extra = [p.name for p in out.glob("*.java") if p.name not in files]
        if stale or extra:
            print(f"corpus out of date: {len(stale)} stale, {len(extra)} extra")
            return 1
        print(f"corpus up to date ({len(files)} files)")
        return 0
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)
    print(f"wrote {len(files)} files to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
