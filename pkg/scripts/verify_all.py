#!/usr/bin/env python3
"""Run the full cross-pipeline verification on the standard window."""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from roqcharts.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify", "all", "--window=-12..12", "--padding", "4"]))
