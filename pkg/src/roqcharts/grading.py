"""RO(Q)-graded degrees, windowed charts, and the closed-form charts.

A degree x + y*sigma is stored as the integer pair (x, y) and displayed
at cartesian (x, y).  Charts associate finitely generated abelian groups
with named generators to degrees inside a finite window; absent degrees
are the zero group.  Structure maps (multiplication by a, u, U, vbar)
are stored as integer matrices between the chosen generator bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exactalg import FgAbelian, IntMatrix


Degree = tuple[int, int]

# degrees of the multiplication operators in (x, y) coordinates
MAP_DEGREES: dict[str, Degree] = {
    "a": (0, -1),
    "u": (2, -2),
    "U": (4, -4),
    "vbar": (1, 1),
}

SQUARE = "square"
CIRCLE = "circle"
DOT = "dot"


class ChartError(Exception):
    pass


class OutOfWindowError(ChartError):
    """A degree outside the chart window was queried where that matters."""


@dataclass(frozen=True)
class Window:
    xmin: int
    xmax: int
    ymin: int
    ymax: int

    def __post_init__(self):
        if self.xmin > self.xmax or self.ymin > self.ymax:
            raise ChartError("empty window")

    @staticmethod
    def square(radius: int) -> "Window":
        return Window(-radius, radius, -radius, radius)

    def contains(self, d: Degree) -> bool:
        x, y = d
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax

    def degrees(self):
        for x in range(self.xmin, self.xmax + 1):
            for y in range(self.ymin, self.ymax + 1):
                yield (x, y)

    def pad(self, n: int) -> "Window":
        return Window(self.xmin - n, self.xmax + n, self.ymin - n, self.ymax + n)

    def intersect(self, other: "Window") -> "Window":
        return Window(max(self.xmin, other.xmin), min(self.xmax, other.xmax),
                      max(self.ymin, other.ymin), min(self.ymax, other.ymax))

    def __str__(self):
        return f"[{self.xmin}..{self.xmax}]x[{self.ymin}..{self.ymax}]"


@dataclass(frozen=True)
class Generator:
    """One named generator of a chart entry.

    order 0 means an infinite cyclic summand; a circle annotation marks a
    free generator that is twice the evident lattice element.
    """

    label: str
    annotation: str
    order: int = 0

    def __post_init__(self):
        if self.annotation not in (SQUARE, CIRCLE, DOT):
            raise ChartError(f"unknown annotation {self.annotation!r}")
        if self.annotation == DOT and self.order == 0:
            raise ChartError("dots must carry torsion")
        if self.annotation in (SQUARE, CIRCLE) and self.order != 0:
            raise ChartError("squares and circles are infinite cyclic")


@dataclass(frozen=True)
class ChartEntry:
    gens: tuple[Generator, ...]
    exact: bool = True

    @property
    def group(self) -> FgAbelian:
        return FgAbelian.from_orders([g.order for g in self.gens])

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(g.order for g in self.gens)

    def labels(self) -> tuple[str, ...]:
        return tuple(g.label for g in self.gens)


@dataclass
class Chart:
    """Windowed chart.  Treated as immutable once built."""

    name: str
    window: Window
    entries: dict[Degree, ChartEntry] = field(default_factory=dict)
    maps: dict[str, dict[Degree, IntMatrix]] = field(default_factory=dict)

    def entry(self, d: Degree) -> ChartEntry | None:
        return self.entries.get(d)

    def group(self, d: Degree) -> FgAbelian:
        e = self.entries.get(d)
        return e.group if e is not None else FgAbelian.zero()

    def orders(self, d: Degree) -> tuple[int, ...]:
        e = self.entries.get(d)
        return e.orders if e is not None else ()

    def is_exact(self, d: Degree) -> bool:
        e = self.entries.get(d)
        return e.exact if e is not None else True

    def nonzero_degrees(self) -> list[Degree]:
        return sorted(self.entries)

    def map_names(self) -> list[str]:
        return sorted(self.maps)


def mult_map(chart: Chart, name: str, d: Degree) -> IntMatrix:
    """Matrix of multiplication by a named class out of degree d.

    Out-of-window source or target raises; a missing matrix over valid
    degrees is the zero map and comes back with the right shape.
    """
    if name not in MAP_DEGREES:
        raise ChartError(f"unknown structure map {name!r}")
    dx, dy = MAP_DEGREES[name]
    target = (d[0] + dx, d[1] + dy)
    if not chart.window.contains(d) or not chart.window.contains(target):
        raise OutOfWindowError(f"{name}-multiplication at {d} leaves window {chart.window}")
    per_degree = chart.maps.get(name, {})
    if d in per_degree:
        return per_degree[d]
    src = chart.entries.get(d)
    dst = chart.entries.get(target)
    return IntMatrix.zero(len(dst.gens) if dst else 0, len(src.gens) if src else 0)


def reduce_matrix(mat: IntMatrix, dst_orders: tuple[int, ...]) -> IntMatrix:
    rows = []
    for i in range(mat.rows):
        o = dst_orders[i]
        rows.append([x % o if o else x for x in mat.row(i)])
    return IntMatrix.from_rows(rows) if rows else IntMatrix.zero(0, mat.cols)


def check_square_commutes(chart: Chart, name1: str, name2: str) -> list[Degree]:
    """Degrees where the two multiplications fail to commute (in window)."""
    d1, d2 = MAP_DEGREES[name1], MAP_DEGREES[name2]
    bad = []
    w = chart.window
    for d in w.degrees():
        mid1 = (d[0] + d1[0], d[1] + d1[1])
        mid2 = (d[0] + d2[0], d[1] + d2[1])
        far = (d[0] + d1[0] + d2[0], d[1] + d1[1] + d2[1])
        if not (w.contains(mid1) and w.contains(mid2) and w.contains(far)):
            continue
        first = mult_map(chart, name2, mid1).mul(mult_map(chart, name1, d))
        second = mult_map(chart, name1, mid2).mul(mult_map(chart, name2, d))
        orders = chart.orders(far)
        if reduce_matrix(first, orders) != reduce_matrix(second, orders):
            bad.append(d)
    return bad


# ---------------------------------------------------------------------------
# Summand descriptors for the two closed-form charts
#
# Descriptors are small tuples with a kind tag; they drive entry
# construction, generator labels, structure-map coefficients, and the
# Bockstein differential, so every consumer agrees on the cell structure.
# ---------------------------------------------------------------------------

def _pow(sym: str, e: int) -> str:
    if e == 0:
        return ""
    if e == 1:
        return sym
    return f"{sym}^{e}"


def _join(*parts: str) -> str:
    s = " ".join(p for p in parts if p)
    return s if s else "1"


# ---- integral Eilenberg-MacLane theory -----------------------------------

def hz_summands(x: int, y: int, variant: str = "genuine") -> list[tuple]:
    """Summand descriptors of the integral theory at (x, y).

    genuine: squares u^j on the antidiagonal for x >= 0 with full
    a-columns below, circles 2u^-j for x < 0 even, and the dual towers
    t(j, y) one column left of and above each circle.
    hfp: squares at every even x (u inverted) with full columns below.
    """
    out: list[tuple] = []
    if x % 2 == 0:
        j = x // 2
        if y == -x:
            if variant == "genuine" and j < 0:
                out.append(("ucirc", -j))
            else:
                out.append(("usq", j))
        elif y < -x and (j >= 0 or variant == "hfp"):
            out.append(("ucol", -x - y, j))
    else:
        if variant == "genuine" and x <= -3 and y >= -x:
            out.append(("utow", (-x - 1) // 2, y))
    return out


def hz_degree(desc: tuple) -> Degree:
    kind = desc[0]
    if kind == "usq":
        return (2 * desc[1], -2 * desc[1])
    if kind == "ucol":
        k, j = desc[1], desc[2]
        return (2 * j, -2 * j - k)
    if kind == "ucirc":
        return (-2 * desc[1], 2 * desc[1])
    if kind == "utow":
        return (-2 * desc[1] - 1, desc[2])
    raise ChartError(f"unknown descriptor {desc!r}")


def hz_generator(desc: tuple) -> Generator:
    kind = desc[0]
    if kind == "usq":
        return Generator(_join(_pow("u", desc[1])), SQUARE, 0)
    if kind == "ucol":
        k, j = desc[1], desc[2]
        return Generator(_join(_pow("a", k), _pow("u", j)), DOT, 2)
    if kind == "ucirc":
        return Generator("2" + _pow("u", -desc[1]), CIRCLE, 0)
    if kind == "utow":
        return Generator(f"t({desc[1]},{desc[2]})", DOT, 2)
    raise ChartError(f"unknown descriptor {desc!r}")


def hz_map_image(name: str, desc: tuple) -> list[tuple[tuple, int]]:
    """Image of a closed-form generator under a structure map."""
    kind = desc[0]
    if name == "a":
        if kind == "usq":
            return [(("ucol", 1, desc[1]), 1)]
        if kind == "ucol":
            return [(("ucol", desc[1] + 1, desc[2]), 1)]
        if kind == "ucirc":
            return []
        if kind == "utow":
            j, yy = desc[1], desc[2]
            return [(("utow", j, yy - 1), 1)] if yy - 1 >= 2 * j + 1 else []
    if name == "u":
        if kind == "usq":
            return [(("usq", desc[1] + 1), 1)]
        if kind == "ucol":
            return [(("ucol", desc[1], desc[2] + 1), 1)]
        if kind == "ucirc":
            j = desc[1]
            return [(("usq", 0), 2)] if j == 1 else [(("ucirc", j - 1), 1)]
        if kind == "utow":
            j, yy = desc[1], desc[2]
            return [(("utow", j - 1, yy - 2), 1)] if j >= 2 else []
    raise ChartError(f"no {name}-multiplication on {desc!r}")


# ---- connective Real K-theory ---------------------------------------------

def kr_summands(x: int, y: int, variant: str = "genuine") -> list[tuple]:
    """Summand descriptors of connective Real K-theory at (x, y).

    The block at U^j contributes, for j >= 0 (and every j for the
    homotopy-fixed-point variant): the square U^j with its a-column,
    the vbar-diagonal of squares, the two slope-one dot rays starting
    at a*vbar and a^2*vbar, and the circle ray starting at 2u.
    Negative genuine blocks replace the square by the circle 2U^-k,
    drop the a-column, and add the dual tower at x = -4k - 1.
    """
    out: list[tuple] = []
    diff = x - y
    if diff % 8 == 0:
        j = diff // 8
        m = x - 4 * j
        if j >= 0 or variant == "hfp":
            if m >= 0:
                out.append(("Usq", j, m))
        else:
            if m == 0:
                out.append(("Ucirc2", -j))
            elif m >= 1:
                out.append(("Usq", j, m))
    if diff % 8 == 1:
        j = (diff - 1) // 8
        m = x - 4 * j
        if m >= 1:
            out.append(("Uray_a", m, j))
    if diff % 8 == 2:
        j = (diff - 2) // 8
        m = x - 4 * j
        if m >= 1:
            out.append(("Uray_a2", m, j))
    if diff % 8 == 4:
        j = (diff - 4) // 8
        m = x - 4 * j - 2
        if m >= 0:
            out.append(("Uray_2u", m, j))
    if x % 4 == 0 and y < -x and (x >= 0 or variant == "hfp"):
        out.append(("Ucol", -x - y, x // 4))
    if variant == "genuine" and x % 4 == 3 and x <= -5 and y >= -x:
        out.append(("Utow", (-x - 1) // 4, y))
    return out


def kr_degree(desc: tuple) -> Degree:
    kind = desc[0]
    if kind == "Usq":
        j, m = desc[1], desc[2]
        return (4 * j + m, -4 * j + m)
    if kind == "Ucirc2":
        k = desc[1]
        return (-4 * k, 4 * k)
    if kind == "Ucol":
        i, j = desc[1], desc[2]
        return (4 * j, -4 * j - i)
    if kind == "Uray_a":
        m, j = desc[1], desc[2]
        return (4 * j + m, -4 * j + m - 1)
    if kind == "Uray_a2":
        m, j = desc[1], desc[2]
        return (4 * j + m, -4 * j + m - 2)
    if kind == "Uray_2u":
        m, j = desc[1], desc[2]
        return (4 * j + 2 + m, -4 * j - 2 + m)
    if kind == "Utow":
        return (-4 * desc[1] - 1, desc[2])
    raise ChartError(f"unknown descriptor {desc!r}")


def kr_generator(desc: tuple) -> Generator:
    kind = desc[0]
    if kind == "Usq":
        j, m = desc[1], desc[2]
        return Generator(_join(_pow("vb", m), _pow("U", j)), SQUARE, 0)
    if kind == "Ucirc2":
        return Generator("2" + _pow("U", -desc[1]), CIRCLE, 0)
    if kind == "Ucol":
        i, j = desc[1], desc[2]
        return Generator(_join(_pow("a", i), _pow("U", j)), DOT, 2)
    if kind == "Uray_a":
        m, j = desc[1], desc[2]
        return Generator(_join("a", _pow("vb", m), _pow("U", j)), DOT, 2)
    if kind == "Uray_a2":
        m, j = desc[1], desc[2]
        return Generator(_join("a^2", _pow("vb", m), _pow("U", j)), DOT, 2)
    if kind == "Uray_2u":
        m, j = desc[1], desc[2]
        return Generator(_join("2u", _pow("vb", m), _pow("U", j)), CIRCLE, 0)
    if kind == "Utow":
        return Generator(f"t({desc[1]},{desc[2]})", DOT, 2)
    raise ChartError(f"unknown descriptor {desc!r}")


def kr_map_image(name: str, desc: tuple) -> list[tuple[tuple, int]]:
    kind = desc[0]
    if name == "a":
        if kind == "Usq":
            j, m = desc[1], desc[2]
            if m == 0:
                return [(("Ucol", 1, j), 1)]
            return [(("Uray_a", m, j), 1)]
        if kind == "Ucol":
            return [(("Ucol", desc[1] + 1, desc[2]), 1)]
        if kind == "Uray_a":
            return [(("Uray_a2", desc[1], desc[2]), 1)]
        if kind in ("Uray_a2", "Uray_2u", "Ucirc2"):
            return []
        if kind == "Utow":
            k, yy = desc[1], desc[2]
            return [(("Utow", k, yy - 1), 1)] if yy - 1 >= 4 * k + 1 else []
    if name == "vbar":
        if kind == "Usq":
            return [(("Usq", desc[1], desc[2] + 1), 1)]
        if kind == "Ucirc2":
            return [(("Usq", -desc[1], 1), 2)]
        if kind == "Ucol":
            i, j = desc[1], desc[2]
            if i == 1:
                return [(("Uray_a", 1, j), 1)]
            if i == 2:
                return [(("Uray_a2", 1, j), 1)]
            return []
        if kind == "Uray_a":
            return [(("Uray_a", desc[1] + 1, desc[2]), 1)]
        if kind == "Uray_a2":
            return [(("Uray_a2", desc[1] + 1, desc[2]), 1)]
        if kind == "Uray_2u":
            return [(("Uray_2u", desc[1] + 1, desc[2]), 1)]
        if kind == "Utow":
            return []
    if name == "U":
        if kind == "Usq":
            return [(("Usq", desc[1] + 1, desc[2]), 1)]
        if kind == "Ucirc2":
            k = desc[1]
            return [(("Usq", 0, 0), 2)] if k == 1 else [(("Ucirc2", k - 1), 1)]
        if kind == "Ucol":
            return [(("Ucol", desc[1], desc[2] + 1), 1)]
        if kind == "Uray_a":
            return [(("Uray_a", desc[1], desc[2] + 1), 1)]
        if kind == "Uray_a2":
            return [(("Uray_a2", desc[1], desc[2] + 1), 1)]
        if kind == "Uray_2u":
            return [(("Uray_2u", desc[1], desc[2] + 1), 1)]
        if kind == "Utow":
            k, yy = desc[1], desc[2]
            return [(("Utow", k - 1, yy - 4), 1)] if k >= 2 else []
    raise ChartError(f"no {name}-multiplication on {desc!r}")


# ---------------------------------------------------------------------------
# Closed-form chart builders
# ---------------------------------------------------------------------------

def _build_chart(name: str, window: Window, summands, degree_of, generator_of,
                 map_image, map_names: tuple[str, ...]) -> Chart:
    entries: dict[Degree, ChartEntry] = {}
    descs: dict[Degree, list[tuple]] = {}
    for d in window.degrees():
        ds = summands(d[0], d[1])
        if ds:
            descs[d] = ds
            entries[d] = ChartEntry(tuple(generator_of(s) for s in ds))
    maps: dict[str, dict[Degree, IntMatrix]] = {n: {} for n in map_names}
    for mname in map_names:
        dx, dy = MAP_DEGREES[mname]
        for d, ds in descs.items():
            target = (d[0] + dx, d[1] + dy)
            if not window.contains(target):
                continue
            tds = descs.get(target, [])
            rows = [[0] * len(ds) for _ in tds]
            for col, s in enumerate(ds):
                for timg, coeff in map_image(mname, s):
                    if degree_of(timg) != target:
                        raise ChartError(f"map {mname} on {s!r} lands off-degree")
                    rows[tds.index(timg)][col] = coeff
            if tds and ds:
                maps[mname][d] = IntMatrix.from_rows(rows)
    return Chart(name=name, window=window, entries=entries, maps=maps)


def closed_form_hz(window: Window) -> Chart:
    """The integral theory from its block decomposition, degree by degree."""
    return _build_chart("hz-closed", window, hz_summands, hz_degree,
                        hz_generator, hz_map_image, ("a", "u"))


def closed_form_kr(window: Window) -> Chart:
    """Connective Real K-theory from its block decomposition."""
    return _build_chart("kr-closed", window, kr_summands, kr_degree,
                        kr_generator, kr_map_image, ("a", "vbar", "U"))
