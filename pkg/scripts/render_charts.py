#!/usr/bin/env python3
"""Render the genuine charts of both theories, plus the intermediate
Tate-square stages, into out/ as SVG and chart documents."""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from roqcharts.chartio import render, serialize
from roqcharts.grading import Window, closed_form_hz, closed_form_kr
from roqcharts.theories import hz_seed, kr_seed, run_tate_pipeline


def main() -> int:
    out = pathlib.Path(__file__).resolve().parent.parent / "out"
    out.mkdir(exist_ok=True)
    window = Window.square(12)
    for name, chart in (("hz_closed", closed_form_hz(window)),
                        ("kr_closed", closed_form_kr(window))):
        (out / f"{name}.svg").write_bytes(render(chart, "svg"))
        (out / f"{name}.txt").write_bytes(render(chart, "text"))
        (out / f"{name}.chart").write_text(serialize(chart))
        print(f"wrote {name}.{{svg,txt,chart}}")
    for seed in (hz_seed(), kr_seed()):
        data = run_tate_pipeline(seed, window, padding=4)
        for stage, chart in (("hfp", data.hfp), ("tate", data.tate),
                             ("orbits", data.orbits), ("phi", data.phi),
                             ("genuine", data.genuine)):
            path = out / f"{seed.name}_{stage}.svg"
            path.write_bytes(render(chart, "svg"))
        print(f"wrote {seed.name} pipeline stages")
    return 0


if __name__ == "__main__":
    sys.exit(main())
