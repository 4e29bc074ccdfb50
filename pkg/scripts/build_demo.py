#!/usr/bin/env python3
"""Build and process the bundled demo screencast into a browsable workspace.

Renders the demo video, runs the full pipeline on it, builds the search
index, and prints the serve command for exploring the result.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from psc2code.cli import main as cli_main
from psc2code.demo import build_demo
from psc2code.pipeline import run_pipeline


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", default="demo-workspace",
                        help="directory for fixtures and the processed workspace")
    args = parser.parse_args(argv)

    root = Path(args.root).resolve()
    facts = build_demo(root)
    summary = run_pipeline(facts["source"], facts["config"])
    print(json.dumps(summary, indent=2))
    if "failed" in summary:
        return 1

    workspace = facts["config"].workspace
    rc = cli_main(["index", "--workspace", workspace])
    if rc != 0:
        return rc
    print(f"\nworkspace ready: {workspace}")
    print(f"browse it with: psc2code serve --workspace {workspace}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
