#!/usr/bin/env python3
"""Run one of the bundled experiment configs.

Usage:
    python scripts/run_experiment.py fig1d [--out DIR]

Equivalent to `dispersim run scripts/configs/<name>.json`; output lands in
results/<name>/ next to this repository unless --out overrides it.
"""

import sys
from pathlib import Path

from dispersim.cli import main

CONFIG_DIR = Path(__file__).resolve().parent / "configs"


def run() -> int:
    if len(sys.argv) < 2:
        names = sorted(p.stem for p in CONFIG_DIR.glob("*.json"))
        print(f"usage: {sys.argv[0]} <{'|'.join(names)}> [--out DIR]", file=sys.stderr)
        return 2
    name, extra = sys.argv[1], sys.argv[2:]
    config = CONFIG_DIR / f"{name}.json"
    if not config.exists():
        print(f"no bundled config for {name!r} ({config})", file=sys.stderr)
        return 2
    return main(["run", str(config), *extra])


if __name__ == "__main__":
    sys.exit(run())
