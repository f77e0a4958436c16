"""Theory seeds and the theory-level pipelines.

Two theories are wired up: the integral Eilenberg-MacLane theory (hz)
and connective Real K-theory (kr).  Each seed carries the fixed-point
page presentation with its differential rounds, a connectivity
certificate, and label conventions.  On top of the page engine and the
Tate square this module adds the vbar-Bockstein spectral sequence with
its degree -(2,1) operation, the slice re-indexing, and the structural
chart checkers (gap and connectivity).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import chartio
from .exactalg import FgAbelian, has_nonzero_hom
from .grading import (Chart, ChartEntry, Degree, Generator, Window, CIRCLE,
                      DOT, SQUARE, ChartError, hz_summands, mult_map)
from .specseq import (DifferentialRule, Page, PageGenerator, Presentation,
                      collapse_to_chart, find_candidates,
                      page_from_presentation, set_differential, turn_page)
from .tate import TateSquareData, run_tate_square
from .exactalg import map_is_iso


class TheoryError(Exception):
    pass


@dataclass(frozen=True)
class TheorySeed:
    name: str
    presentation: Presentation
    rules: tuple[DifferentialRule, ...]
    connective: bool
    map_monos: dict[str, dict[str, int]] = field(default_factory=dict)

    def label_of(self, mono, coeff: int) -> str:
        return _page_label(self.name, self.presentation, mono, coeff)


# Seeds are declared in the chart-io text format and parsed, so new
# theories can be added the same way without touching code.

HZ_SEED_TEXT = """roqcharts-seed v1
name: hz
generator: a -1 1 -1
generator: lam 0 1 -1 invertible
differential: 1 | lam -> 2 a
connective: yes
"""

KR_SEED_TEXT = """roqcharts-seed v1
name: kr
generator: a -1 1 -1
generator: vb 0 1 1
generator: lam 0 1 -1 invertible
differential: 1 | lam -> 2 a
differential: 2 | lam^2 -> a^3 vb
connective: yes
"""


def seed_from_spec(spec: "chartio.SeedSpec") -> TheorySeed:
    pres = Presentation(tuple(PageGenerator(n, tri, inv)
                              for n, tri, inv in spec.generators))
    rules = tuple(DifferentialRule(label, tuple(sorted(src.items())), coeff,
                                   tuple(sorted(dst.items())))
                  for label, src, coeff, dst in spec.differentials)
    maps: dict[str, dict[str, int]] = {}
    names = {g.name for g in pres.generators}
    if "a" in names:
        maps["a"] = {"a": 1}
    if "vb" in names:
        maps["vbar"] = {"vb": 1}
    if "lam" in names:
        maps["u"] = {"lam": 2}
        maps["U"] = {"lam": 4}
    return TheorySeed(spec.name, pres, rules, spec.connective, maps)


def hz_seed() -> TheorySeed:
    return seed_from_spec(chartio.parse_seed(HZ_SEED_TEXT))


def kr_seed() -> TheorySeed:
    return seed_from_spec(chartio.parse_seed(KR_SEED_TEXT))


def _page_label(theory: str, pres: Presentation, mono, coeff: int) -> str:
    """Fold lambda powers into the standard periodicity class names."""
    powers = {g.name: e for g, e in zip(pres.generators, mono) if e}
    lam = powers.pop("lam", 0)
    parts = []
    if coeff == 2:
        parts.append("2")
    elif coeff not in (1,):
        parts.append(str(coeff))
    if powers.get("a"):
        e = powers["a"]
        parts.append("a" if e == 1 else f"a^{e}")
    if theory == "kr":
        n, rem = divmod(lam, 4)
        if rem == 2:
            if parts and parts[0] == "2":
                parts[0] = "2u"
            else:
                parts.append("u")
        if powers.get("vb"):
            e = powers["vb"]
            parts.append("vb" if e == 1 else f"vb^{e}")
        if n:
            parts.append("U" if n == 1 else f"U^{n}")
    else:
        n, rem = divmod(lam, 2)
        if rem:
            parts.append(f"lam^{lam}")
            n = 0
        if n:
            parts.append("u" if n == 1 else f"u^{n}")
    return " ".join(parts) if parts else "1"


# ---------------------------------------------------------------------------
# homotopy fixed points and the Tate pipeline
# ---------------------------------------------------------------------------

def build_pages(seed: TheorySeed) -> list[Page]:
    """E_1 and the page after each differential round."""
    pages = [page_from_presentation(seed.presentation)]
    for rule in seed.rules:
        pages.append(turn_page(set_differential(pages[-1], rule)))
    return pages


def run_hfpss(seed: TheorySeed, window: Window, depth: int = 16) -> Chart:
    """Drive the page engine to its collapsed chart with structure maps.

    Structure maps are only attached for monomials that survive as
    classes of the final page (multiplication by anything else is not
    defined there; for instance the square root of the periodicity class
    supports the second differential of Real K-theory).
    """
    page = build_pages(seed)[-1]
    live_maps = {name: powers for name, powers in seed.map_monos.items()
                 if page.is_cycle(powers)}
    return collapse_to_chart(page, window, f"{seed.name}-hfp",
                             label_of=lambda m, c: seed.label_of(m, c),
                             map_monos=live_maps, depth=depth)


def hfpss_collapse_certificates(seed: TheorySeed, window: Window,
                                depth: int = 16, r_cap: int = 16):
    """Candidate lists proving every later differential vanishes in window.

    One list per page: an intermediate page is answerable for shapes
    strictly between the round just applied and the round about to be,
    the final page for every later shape up to r_cap.  All lists must
    come back empty; nothing is assumed collapsed without this search.
    """
    from .specseq import rule_shift
    shapes = [rule_shift(seed.presentation, rule)[0] for rule in seed.rules]
    if shapes != sorted(shapes):
        raise TheoryError("differential rounds must come in increasing shape")
    pages = build_pages(seed)
    out = []
    for i, page in enumerate(pages):
        cands = find_candidates(page, window, depth=depth, r_cap=r_cap)
        lo = shapes[i - 1] if i > 0 else 0
        hi = shapes[i] if i < len(shapes) else r_cap + 1
        cands = [c for c in cands if lo < c[0] < hi]
        out.append((page.page_label, cands))
    return out


def run_tate_pipeline(seed: TheorySeed, window: Window, padding: int = 4,
                      depth: int = 16) -> TateSquareData:
    """Homotopy fixed points on a padded window, then the Tate square.

    The fixed-point window is extended far enough below the antidiagonal
    that every a-column has room to stabilize before the bottom edge;
    a too-small extension is caught by the stabilization check anyway.
    """
    if padding < 1:
        raise TheoryError("the Tate square needs at least one degree of padding")
    xmin, xmax = window.xmin - padding, window.xmax + padding
    ymin = min(window.ymin - padding, -xmax - 4)
    ymax = window.ymax + padding
    hfp = run_hfpss(seed, Window(xmin, xmax, ymin, ymax), depth=depth)
    return run_tate_square(hfp, seed.connective, window, f"{seed.name}-tate")


# ---------------------------------------------------------------------------
# the vbar-Bockstein spectral sequence
# ---------------------------------------------------------------------------

THETA_DEGREE: Degree = (-2, -1)


def theta_apply(desc: tuple) -> tuple | None:
    """The degree -(2+sigma) operation on closed-form generators.

    On the lower half-plane it is a^3-multiplication combined with one
    step of u-division, nonzero exactly on odd u-powers; the circles map
    to zero; on the dual towers it shifts one tower left and one step
    down, nonzero on odd towers wherever the target exists.
    """
    kind = desc[0]
    if kind == "usq":
        j = desc[1]
        return ("ucol", 3, j - 1) if j % 2 == 1 else None
    if kind == "ucol":
        k, j = desc[1], desc[2]
        return ("ucol", k + 3, j - 1) if j % 2 == 1 else None
    if kind == "ucirc":
        return None
    if kind == "utow":
        j, y = desc[1], desc[2]
        if j % 2 == 1 and y >= 2 * j + 4:
            return ("utow", j + 1, y - 1)
        return None
    raise TheoryError(f"unknown generator {desc!r}")


@dataclass(frozen=True)
class BssClass:
    """One surviving class on a Bockstein floor.

    index2 marks the infinite cyclic classes surviving as twice the
    first-page generator (the large circles of the collapsed display).
    """

    floor: int
    desc: tuple
    index2: bool

    @property
    def order(self) -> int:
        return 0 if self.desc[0] in ("usq", "ucirc") else 2

    def total_degree(self) -> Degree:
        from .grading import hz_degree
        x, y = hz_degree(self.desc)
        return (x + self.floor, y + self.floor)

    def label(self) -> str:
        from .grading import hz_generator
        base = hz_generator(self.desc).label
        vh = "" if self.floor == 0 else ("vh" if self.floor == 1 else f"vh^{self.floor}")
        if base == "1":
            base = ""
        two = "2" if self.index2 and not base.startswith("2") else ""
        label = " ".join(p for p in (two, vh, base) if p)
        return label if label else "1"


def bss_floor_survivors(floor: int, p: Degree) -> list[BssClass]:
    """Classes of the collapsed Bockstein page on one floor at one
    base degree, straight from the kernel/image combinatorics of the
    theta differential."""
    out = []
    for desc in hz_summands(p[0], p[1]):
        kind = desc[0]
        if kind == "usq":
            out.append(BssClass(floor, desc, desc[1] % 2 == 1))
        elif kind == "ucirc":
            out.append(BssClass(floor, desc, False))
        elif kind == "ucol":
            k, j = desc[1], desc[2]
            if j % 2 == 1:
                continue  # not a cycle
            if floor == 0 or k <= 2:
                out.append(BssClass(floor, desc, False))
        elif kind == "utow":
            j, y = desc[1], desc[2]
            if j % 2 == 1:
                if y <= 2 * j + 3:
                    out.append(BssClass(floor, desc, False))
            elif floor == 0:
                out.append(BssClass(floor, desc, False))
    return out


def _is_stub_top(desc: tuple) -> bool:
    return desc[0] == "utow" and desc[1] % 2 == 1 and desc[2] == 2 * desc[1] + 3


def _has_a_preimage_on_floor(cls: BssClass) -> bool:
    """Whether the class is an a-multiple on its own floor at the
    collapsed page; with 2a = 0 this certifies an order-2 lift and
    hence a split extension wherever the class tops a filtration."""
    kind = cls.desc[0]
    if kind == "ucol":
        k, j = cls.desc[1], cls.desc[2]
        if k == 1:
            return True  # image of the square above
        up = ("ucol", k - 1, j)
        return any(c.desc == up for c in
                   bss_floor_survivors(cls.floor, _desc_degree(up)))
    if kind == "utow":
        j, y = cls.desc[1], cls.desc[2]
        up = ("utow", j, y + 1)
        return any(c.desc == up for c in
                   bss_floor_survivors(cls.floor, _desc_degree(up)))
    return False


def _desc_degree(desc: tuple) -> Degree:
    from .grading import hz_degree
    return hz_degree(desc)


@dataclass
class BocksteinResult:
    floors: int
    chart: Chart
    absorbed: list[tuple[Degree, BssClass]]
    candidates: list


def run_bockstein(window: Window, padding: int = 4,
                  r_cap: int = 12) -> BocksteinResult:
    """The Real K-theory chart from the integral theory and theta.

    Floors are copies of the integral chart shifted along the diagonal;
    the first differential is theta pushed up one floor.  The collapsed
    floors are assembled by total degree, with the top class of each
    odd stub absorbed into the infinite cyclic class one floor up (its
    index-2 partner), and every extension split via a-divisibility and
    2a = 0.  Higher differentials are not assumed away: every surviving
    class is searched against every later differential shape, and any
    possible hit is reported as a hard error by the caller.
    """
    floors = window.xmax + window.ymax + padding
    entries: dict[Degree, ChartEntry] = {}
    absorbed: list[tuple[Degree, BssClass]] = []

    theta_ok_checked = _theta_laws(window, floors)
    if theta_ok_checked:
        raise TheoryError(f"theta law violations: {theta_ok_checked[:3]}")

    for d in window.degrees():
        gens: list[Generator] = []
        flagged = False
        contributions: list[BssClass] = []
        for s in range(0, floors + 1):
            p = (d[0] - s, d[1] - s)
            contributions.extend(bss_floor_survivors(s, p))
        for cls in contributions:
            if _is_stub_top(cls.desc):
                absorbed.append((d, cls))
                continue
            if cls.order == 2 and len(contributions) > 1:
                if not _has_a_preimage_on_floor(cls):
                    flagged = True
            annot = DOT if cls.order else (CIRCLE if cls.index2 else SQUARE)
            gens.append(Generator(cls.label(), annot, cls.order))
        if gens:
            entries[d] = ChartEntry(tuple(gens), exact=not flagged)

    chart = Chart(name="kr-bockstein", window=window, entries=entries, maps={})
    candidates = bss_higher_candidates(window, floors, r_cap)
    return BocksteinResult(floors=floors, chart=chart, absorbed=absorbed,
                           candidates=candidates)


def _theta_laws(window: Window, floors: int) -> list[str]:
    """theta has exact degree -(2,1) and squares to zero, everywhere."""
    from .grading import hz_degree
    bad = []
    for d in window.degrees():
        for desc in hz_summands(d[0], d[1]):
            img = theta_apply(desc)
            if img is None:
                continue
            src, dst = hz_degree(desc), hz_degree(img)
            if (dst[0] - src[0], dst[1] - src[1]) != THETA_DEGREE:
                bad.append(f"theta degree wrong on {desc}")
            if not hz_summands(dst[0], dst[1]):
                bad.append(f"theta image of {desc} lands in a zero group")
            if theta_apply(img) is not None:
                bad.append(f"theta squared nonzero on {desc}")
    return bad


def bss_higher_candidates(window: Window, floors: int, r_cap: int):
    """Surviving source/target pairs a later differential could connect."""
    out = []
    for d in window.degrees():
        for s in range(0, floors + 1):
            p = (d[0] - s, d[1] - s)
            for cls in bss_floor_survivors(s, p):
                src_group = FgAbelian.from_orders([cls.order])
                for r in range(2, r_cap + 1):
                    if s + r > floors:
                        break
                    q = (p[0] - (r + 1), p[1] - r)
                    for tgt in bss_floor_survivors(s + r, q):
                        if has_nonzero_hom(src_group,
                                           FgAbelian.from_orders([tgt.order])):
                            out.append((r, d, cls, tgt))
    return out


# ---------------------------------------------------------------------------
# slice re-indexing
# ---------------------------------------------------------------------------

def bss_to_sss(xb: int, yb: int) -> tuple[int, int]:
    return (xb, 2 * yb - xb)


def sss_to_bss(xs: int, ys: int) -> tuple[int, int]:
    if (xs + ys) % 2:
        raise TheoryError(f"({xs},{ys}) has odd parity: structurally zero")
    return (xs, (xs + ys) // 2)


def sss_entry_e1(n: int, s: int) -> FgAbelian:
    """First-page slice entry at Adams coordinates (n, s)."""
    if (n + s) % 2 or s < 0 or (n + s) // 2 < 0:
        return FgAbelian.zero()
    k = (n + s) // 2
    descs = hz_summands(k - s, -k)
    return FgAbelian.from_orders(
        [0 if dd[0] in ("usq", "ucirc") else 2 for dd in descs])


def sss_entry_einf(n: int, s: int) -> FgAbelian:
    """Surviving slice entry at (n, s), read off the Bockstein floor."""
    if (n + s) % 2 or s < 0 or (n + s) // 2 < 0:
        return FgAbelian.zero()
    k = (n + s) // 2
    survivors = bss_floor_survivors(k, (k - s, -k))
    return FgAbelian.from_orders([c.order for c in survivors])


def slice_extract(n_range: tuple[int, int], s_range: tuple[int, int],
                  collapsed: bool = True) -> dict[tuple[int, int], FgAbelian]:
    """The integer-graded slice table over a rectangle of Adams
    coordinates: nonzero entries only, at the first page or collapsed."""
    entry = sss_entry_einf if collapsed else sss_entry_e1
    out: dict[tuple[int, int], FgAbelian] = {}
    for n in range(n_range[0], n_range[1] + 1):
        for s in range(s_range[0], s_range[1] + 1):
            g = entry(n, s)
            if not g.is_zero():
                out[(n, s)] = g
    return out


# ---------------------------------------------------------------------------
# structural checkers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckReport:
    passed: bool
    violations: tuple[tuple[Degree, str], ...]


def gap_check(chart: Chart) -> CheckReport:
    """The three diagonals above the unit diagonal vanish; the diagonal
    entries themselves are free of rank at most one."""
    violations = []
    w = chart.window
    for d in w.degrees():
        x, y = d
        if x - y in (-1, -2, -3) and not chart.group(d).is_zero():
            violations.append((d, f"nonzero group {chart.group(d)} in the gap"))
        if x == y and x >= 0:
            g = chart.group(d)
            if g.torsion or g.rank > 1:
                violations.append((d, f"diagonal entry {g} is not free of rank <= 1"))
    return CheckReport(not violations, tuple(violations))


def connectivity_check(chart: Chart) -> CheckReport:
    """Vanishing below the antidiagonal for x < 0, and a-multiplication
    an isomorphism below the antidiagonal for x >= 0."""
    if "a" not in chart.maps:
        raise ChartError("connectivity check needs a-multiplication data")
    violations = []
    w = chart.window
    for d in w.degrees():
        x, y = d
        if x < 0 and x + y < 0 and not chart.group(d).is_zero():
            violations.append((d, f"nonzero group {chart.group(d)} below the antidiagonal"))
        if x >= 0 and x + y < 0 and w.contains((x, y - 1)):
            mat = mult_map(chart, "a", d)
            if not map_is_iso(mat, chart.orders(d), chart.orders((x, y - 1))):
                violations.append((d, "a-multiplication not an isomorphism"))
    return CheckReport(not violations, tuple(violations))


def inject_class(chart: Chart, d: Degree) -> Chart:
    """A mutated copy with a spurious order-2 class at d (for tests)."""
    entries = dict(chart.entries)
    old = entries.get(d)
    gens = (old.gens if old else ()) + (Generator("spurious", DOT, 2),)
    entries[d] = ChartEntry(gens, exact=old.exact if old else True)
    return Chart(name=chart.name + "-mutated", window=chart.window,
                 entries=entries, maps=chart.maps)
