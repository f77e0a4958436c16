"""Serialization, parsing, rendering and diffing of charts.

The chart document format is line-based, versioned, and canonical:
serializing any chart and parsing it back is the identity, and parsing
a canonical document and serializing it again reproduces it byte for
byte.  The same file carries the declarative seed format, so new
theories are data rather than code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exactalg import FgAbelian
from .grading import (Chart, ChartEntry, Degree, Generator, Window, CIRCLE,
                      DOT, SQUARE)

CHART_MAGIC = "roqcharts-chart v1"
SEED_MAGIC = "roqcharts-seed v1"


class ChartParseError(Exception):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


# ---------------------------------------------------------------------------
# chart documents
# ---------------------------------------------------------------------------

def serialize(chart: Chart) -> str:
    """Canonical text form: header, then one record per nonzero degree,
    sorted by x and then y."""
    lines = [CHART_MAGIC,
             f"name: {chart.name}",
             f"window: {chart.window.xmin} {chart.window.xmax} "
             f"{chart.window.ymin} {chart.window.ymax}"]
    for d in sorted(chart.entries):
        e = chart.entries[d]
        g = e.group
        torsion = ",".join(str(t) for t in g.torsion) if g.torsion else "-"
        gens = "; ".join(f"{gen.label}:{gen.annotation}" for gen in e.gens)
        rec = f"entry: {d[0]} {d[1]} | rank {g.rank} torsion {torsion} | {gens}"
        if not e.exact:
            rec += " | inexact"
        lines.append(rec)
    return "\n".join(lines) + "\n"


def parse(text: str) -> Chart:
    lines = text.splitlines()
    if not lines or lines[0] != CHART_MAGIC:
        raise ChartParseError(1, f"expected header {CHART_MAGIC!r}")
    name = None
    window = None
    entries: dict[Degree, ChartEntry] = {}
    for no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if line.startswith("name: "):
            name = line[len("name: "):]
            continue
        if line.startswith("window: "):
            try:
                xmin, xmax, ymin, ymax = map(int, line[len("window: "):].split())
            except ValueError:
                raise ChartParseError(no, "window needs four integers")
            window = Window(xmin, xmax, ymin, ymax)
            continue
        if not line.startswith("entry: "):
            raise ChartParseError(no, f"unrecognized line {line!r}")
        fields = line[len("entry: "):].split(" | ")
        if len(fields) < 3:
            raise ChartParseError(no, "entry needs degree, group and generators")
        try:
            x, y = map(int, fields[0].split())
        except ValueError:
            raise ChartParseError(no, "entry degree needs two integers")
        gparts = fields[1].split()
        if len(gparts) != 4 or gparts[0] != "rank" or gparts[2] != "torsion":
            raise ChartParseError(no, f"malformed group field {fields[1]!r}")
        try:
            rank = int(gparts[1])
            torsion = [] if gparts[3] == "-" else [int(t) for t in gparts[3].split(",")]
        except ValueError:
            raise ChartParseError(no, f"malformed group field {fields[1]!r}")
        gens = []
        free_seen = tors_seen = 0
        for chunk in fields[2].split("; "):
            label, sep, annot = chunk.rpartition(":")
            if not sep or annot not in (SQUARE, CIRCLE, DOT):
                raise ChartParseError(no, f"malformed generator {chunk!r}")
            if annot == DOT:
                if tors_seen >= len(torsion):
                    raise ChartParseError(no, "more dots than torsion coefficients")
                gens.append(Generator(label, annot, torsion[tors_seen]))
                tors_seen += 1
            else:
                gens.append(Generator(label, annot, 0))
                free_seen += 1
        if free_seen != rank or tors_seen != len(torsion):
            raise ChartParseError(no, "generators do not account for the group")
        exact = not (len(fields) > 3 and fields[3] == "inexact")
        entries[(x, y)] = ChartEntry(tuple(gens), exact=exact)
    if name is None or window is None:
        raise ChartParseError(len(lines), "missing name or window header")
    for d in entries:
        if not window.contains(d):
            raise ChartParseError(1, f"entry at {d} outside window {window}")
    return Chart(name=name, window=window, entries=entries, maps={})


# ---------------------------------------------------------------------------
# diffing
# ---------------------------------------------------------------------------

@dataclass
class DiffReport:
    group_diffs: list[tuple[Degree, FgAbelian, FgAbelian, str]] = field(default_factory=list)
    label_diffs: list[tuple[Degree, tuple, tuple]] = field(default_factory=list)
    window_mismatch: bool = False

    @property
    def clean(self) -> bool:
        return not self.group_diffs

    def summary(self) -> str:
        lines = []
        if self.window_mismatch:
            lines.append("warning: windows differ; compared on the intersection")
        for d, ga, gb, how in self.group_diffs:
            lines.append(f"group diff at {d}: {ga} vs {gb} ({how})")
        for d, la, lb in self.label_diffs:
            lines.append(f"label diff at {d}: {la} vs {lb}")
        if not lines:
            lines.append("charts agree")
        return "\n".join(lines)


def _diff_order(d: Degree):
    return (abs(d[0]) + abs(d[1]), d[0], d[1])


def diff(a: Chart, b: Chart) -> DiffReport:
    """Degreewise comparison: by invariant factors where both entries are
    exact, by composition factors where either is flagged.  Differences
    are listed nearest the origin first."""
    report = DiffReport()
    w = a.window
    if a.window != b.window:
        report.window_mismatch = True
        w = a.window.intersect(b.window)
    for d in sorted(w.degrees(), key=_diff_order):
        ga, gb = a.group(d), b.group(d)
        exact = a.is_exact(d) and b.is_exact(d)
        if exact:
            if ga != gb:
                report.group_diffs.append((d, ga, gb, "normal form"))
                continue
        else:
            if ga.composition_factors() != gb.composition_factors():
                report.group_diffs.append((d, ga, gb, "composition factors"))
                continue
        ea, eb = a.entry(d), b.entry(d)
        la = tuple((g.label, g.annotation) for g in ea.gens) if ea else ()
        lb = tuple((g.label, g.annotation) for g in eb.gens) if eb else ()
        if la != lb:
            report.label_diffs.append((d, la, lb))
    return report


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

GLYPHS = {SQUARE: "□", CIRCLE: "○", DOT: "·"}


def render_text(chart: Chart) -> str:
    """One character cell per degree; multiple generators collapse to '#'."""
    w = chart.window
    lines = [f"{chart.name}  {w}  (x right = Z.1, y up = Z.sigma)"]
    width = max(len(str(w.ymin)), len(str(w.ymax)))
    for y in range(w.ymax, w.ymin - 1, -1):
        row = []
        for x in range(w.xmin, w.xmax + 1):
            e = chart.entry((x, y))
            if e is None:
                row.append("|" if x == 0 else ("-" if y == 0 else " "))
            elif len(e.gens) > 1:
                row.append("#")
            else:
                row.append(GLYPHS[e.gens[0].annotation])
        lines.append(f"{y:>{width}} " + "".join(row))
    footer = " " * (width + 1)
    marks = []
    for x in range(w.xmin, w.xmax + 1):
        marks.append("0" if x == 0 else ("+" if x % 4 == 0 else " "))
    lines.append(footer + "".join(marks))
    return "\n".join(lines) + "\n"


_SVG_CELL = 24


def render_svg(chart: Chart) -> str:
    """Deterministic SVG: squares and circles are open glyphs, dots are
    filled red; the axes carry the cartesian display convention."""
    w = chart.window
    cell = _SVG_CELL
    width = (w.xmax - w.xmin + 3) * cell
    height = (w.ymax - w.ymin + 3) * cell

    def px(x: int) -> int:
        return (x - w.xmin + 1) * cell + cell // 2

    def py(y: int) -> int:
        return (w.ymax - y + 1) * cell + cell // 2

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
             f'width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']
    for x in range(w.xmin, w.xmax + 1):
        parts.append(f'<line x1="{px(x)}" y1="{py(w.ymax)}" x2="{px(x)}" '
                     f'y2="{py(w.ymin)}" stroke="#eeeeee" stroke-width="1"/>')
    for y in range(w.ymin, w.ymax + 1):
        parts.append(f'<line x1="{px(w.xmin)}" y1="{py(y)}" x2="{px(w.xmax)}" '
                     f'y2="{py(y)}" stroke="#eeeeee" stroke-width="1"/>')
    if w.xmin <= 0 <= w.xmax:
        parts.append(f'<line x1="{px(0)}" y1="{py(w.ymax)}" x2="{px(0)}" '
                     f'y2="{py(w.ymin)}" stroke="#8888cc" stroke-width="2"/>')
        parts.append(f'<text x="{px(0) + 4}" y="{py(w.ymax) + 12}" '
                     f'font-size="12" fill="#333399">Z&#183;&#963;</text>')
    if w.ymin <= 0 <= w.ymax:
        parts.append(f'<line x1="{px(w.xmin)}" y1="{py(0)}" x2="{px(w.xmax)}" '
                     f'y2="{py(0)}" stroke="#8888cc" stroke-width="2"/>')
        parts.append(f'<text x="{px(w.xmax) - 24}" y="{py(0) - 6}" '
                     f'font-size="12" fill="#333399">Z&#183;1</text>')
    parts.append(f'<text x="8" y="16" font-size="14" fill="#000000">{chart.name}</text>')
    for d in sorted(chart.entries):
        e = chart.entries[d]
        cx, cy = px(d[0]), py(d[1])
        n = len(e.gens)
        for i, g in enumerate(e.gens):
            off = (i - (n - 1) / 2) * 7
            gx = cx + int(round(off))
            if g.annotation == SQUARE:
                parts.append(f'<rect x="{gx - 5}" y="{cy - 5}" width="10" height="10" '
                             f'fill="none" stroke="black" stroke-width="1.5">'
                             f'<title>{_esc(g.label)}</title></rect>')
            elif g.annotation == CIRCLE:
                parts.append(f'<circle cx="{gx}" cy="{cy}" r="6" fill="none" '
                             f'stroke="black" stroke-width="1.5">'
                             f'<title>{_esc(g.label)}</title></circle>')
            else:
                parts.append(f'<circle cx="{gx}" cy="{cy}" r="3" fill="#cc0000" '
                             f'stroke="#880000" stroke-width="0.5">'
                             f'<title>{_esc(g.label)}</title></circle>')
        if not e.exact:
            parts.append(f'<text x="{cx + 7}" y="{cy - 7}" font-size="9" '
                         f'fill="#cc6600">?</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render(chart: Chart, fmt: str) -> bytes:
    if fmt == "svg":
        return render_svg(chart).encode()
    if fmt == "text":
        return render_text(chart).encode()
    raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# declarative theory seeds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeedSpec:
    """Parsed seed: generators (name, tridegree, invertible), differential
    rounds (page label, source powers, coefficient, target powers), and
    the connectivity certificate."""

    name: str
    generators: tuple[tuple[str, tuple[int, int, int], bool], ...]
    differentials: tuple[tuple[int, dict[str, int], int, dict[str, int]], ...]
    connective: bool


def _parse_powers(tokens: list[str], no: int) -> tuple[int, dict[str, int]]:
    coeff = 1
    powers: dict[str, int] = {}
    for tok in tokens:
        if tok.lstrip("-").isdigit():
            coeff *= int(tok)
            continue
        name, sep, exp = tok.partition("^")
        try:
            powers[name] = powers.get(name, 0) + (int(exp) if sep else 1)
        except ValueError:
            raise ChartParseError(no, f"malformed monomial token {tok!r}")
    return coeff, powers


def parse_seed(text: str) -> SeedSpec:
    lines = text.splitlines()
    if not lines or lines[0] != SEED_MAGIC:
        raise ChartParseError(1, f"expected header {SEED_MAGIC!r}")
    name = None
    gens: list[tuple[str, tuple[int, int, int], bool]] = []
    diffs: list[tuple[int, dict[str, int], int, dict[str, int]]] = []
    connective = False
    for no, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("name: "):
            name = line[len("name: "):]
        elif line.startswith("generator: "):
            toks = line[len("generator: "):].split()
            if len(toks) not in (4, 5):
                raise ChartParseError(no, "generator: name s t b [invertible]")
            try:
                tri = (int(toks[1]), int(toks[2]), int(toks[3]))
            except ValueError:
                raise ChartParseError(no, "generator tridegree needs three integers")
            inv = len(toks) == 5 and toks[4] == "invertible"
            gens.append((toks[0], tri, inv))
        elif line.startswith("differential: "):
            body = line[len("differential: "):]
            try:
                page_str, rest = body.split(" | ", 1)
                page = int(page_str)
                src_str, dst_str = rest.split("->")
            except ValueError:
                raise ChartParseError(no, "differential: page | mono -> [coeff] mono")
            c_src, src = _parse_powers(src_str.split(), no)
            if c_src != 1:
                raise ChartParseError(no, "differential source must be monic")
            coeff, dst = _parse_powers(dst_str.split(), no)
            diffs.append((page, src, coeff, dst))
        elif line.startswith("connective: "):
            connective = line[len("connective: "):].strip() in ("yes", "true", "1")
        else:
            raise ChartParseError(no, f"unrecognized line {line!r}")
    if name is None:
        raise ChartParseError(len(lines), "seed needs a name")
    return SeedSpec(name, tuple(gens), tuple(diffs), connective)


def serialize_seed(spec: SeedSpec) -> str:
    lines = [SEED_MAGIC, f"name: {spec.name}"]
    for n, tri, inv in spec.generators:
        suffix = " invertible" if inv else ""
        lines.append(f"generator: {n} {tri[0]} {tri[1]} {tri[2]}{suffix}")
    for page, src, coeff, dst in spec.differentials:
        src_s = " ".join(f"{k}^{v}" if v != 1 else k for k, v in sorted(src.items()))
        dst_toks = ([] if coeff == 1 else [str(coeff)]) + \
            [f"{k}^{v}" if v != 1 else k for k, v in sorted(dst.items())]
        lines.append(f"differential: {page} | {src_s} -> {' '.join(dst_toks)}")
    lines.append(f"connective: {'yes' if spec.connective else 'no'}")
    return "\n".join(lines) + "\n"
