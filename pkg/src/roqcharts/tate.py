"""The Tate-square pipeline.

Starting from a homotopy-fixed-point chart with its a-multiplications:
invert a column by column (Tate), read homotopy orbits off the long
exact sequence of the lower cofibre sequence, truncate the integer line
to get geometric fixed points, and assemble the genuine chart from the
Mayer-Vietoris sequence of the pullback square.

Extension handling: an entry assembled from a nonzero kernel and a
nonzero cokernel is determined exactly when the kernel part is free
(free quotients split) or when each order-2 kernel generator is a
multiple of a; in the latter case a lift of the form a*x satisfies
2(a*x) = (2a)x = 0, so the extension splits there too.  Anything else
is reported up to extension and flagged on the entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exactalg import (IntMatrix, PresentedGroup, image_contains,
                       map_is_iso, presented_cokernel, presented_kernel)
from .grading import (Chart, ChartEntry, Degree, Generator, Window, CIRCLE,
                      DOT, SQUARE, mult_map, reduce_matrix)


class TatePipelineError(Exception):
    pass


class StabilizationError(TatePipelineError):
    """An a-column failed to stabilize inside the chart window."""


class NotPeriodicError(TatePipelineError):
    """Geometric fixed points need an a-periodic input chart."""


@dataclass
class TateSquareData:
    hfp: Chart
    tate: Chart
    orbits: Chart
    phi: Chart
    genuine: Chart
    loc_maps: dict[Degree, IntMatrix] = field(default_factory=dict)
    phi_maps: dict[Degree, IntMatrix] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# inverting a
# ---------------------------------------------------------------------------

def invert_a_with_maps(chart: Chart, stab_band: int = 2) -> tuple[Chart, dict[Degree, IntMatrix]]:
    """The a-localized chart and the per-degree localization maps.

    Within each column the colimit along downward a-multiplication is
    taken to be the group at the bottom of the window; that is only
    legitimate if the last stab_band maps are isomorphisms, which is
    checked and otherwise raised as an instability error.
    """
    w = chart.window
    colim_entry: dict[int, ChartEntry] = {}
    loc: dict[Degree, IntMatrix] = {}
    entries: dict[Degree, ChartEntry] = {}
    amaps: dict[Degree, IntMatrix] = {}
    for x in range(w.xmin, w.xmax + 1):
        for k in range(stab_band):
            src = (x, w.ymin + k + 1)
            mat = mult_map(chart, "a", src)
            if chart.group(src) != chart.group((x, w.ymin + k)) or not map_is_iso(
                    mat, chart.orders(src), chart.orders((x, w.ymin + k))):
                raise StabilizationError(
                    f"a-column at x = {x} does not stabilize at the bottom of {w} "
                    f"(map out of {src} is not an isomorphism)")
        bottom = chart.entry((x, w.ymin))
        if bottom is None:
            continue
        gens = tuple(Generator(f"loc({g.label})", g.annotation, g.order)
                     for g in bottom.gens)
        colim_entry[x] = ChartEntry(gens)

        # localization map at (x, y): compose a-multiplications down
        n = len(bottom.gens)
        running: dict[int, IntMatrix] = {w.ymin: IntMatrix.identity(n)}
        acc = IntMatrix.identity(n)
        for y in range(w.ymin + 1, w.ymax + 1):
            acc = acc.mul(mult_map(chart, "a", (x, y)))
            running[y] = acc
        for y in range(w.ymin, w.ymax + 1):
            entries[(x, y)] = colim_entry[x]
            loc[(x, y)] = reduce_matrix(running[y], colim_entry[x].orders)
    for x, e in colim_entry.items():
        n = len(e.gens)
        for y in range(w.ymin + 1, w.ymax + 1):
            amaps[(x, y)] = IntMatrix.identity(n)
    out = Chart(name=chart.name + "-tate", window=w, entries=entries,
                maps={"a": amaps})
    return out, loc


def invert_a(chart: Chart, stab_band: int = 2) -> Chart:
    return invert_a_with_maps(chart, stab_band)[0]


# ---------------------------------------------------------------------------
# long-exact-sequence entries
# ---------------------------------------------------------------------------

def _support_label(vec: list[int], labels: list[str], fallback: str) -> tuple[str, bool]:
    support = [(i, c) for i, c in enumerate(vec) if c]
    if len(support) == 1:
        i, c = support[0]
        if abs(c) == 1:
            return labels[i], False
        if abs(c) == 2:
            return "2 " + labels[i], True
        return f"{abs(c)} {labels[i]}", False
    return fallback, False


def _les_entry(coker: PresentedGroup, coker_tag: str, ker: PresentedGroup,
               src_labels: list[str], ker_torsion_covered: bool) -> ChartEntry | None:
    """Entry for 0 -> coker -> G -> ker -> 0, flagged when ambiguous."""
    gens: list[Generator] = []
    for j, o in enumerate(coker.orders):
        label = coker_tag if len(coker.orders) == 1 else f"{coker_tag}[{j}]"
        gens.append(Generator(label, DOT if o else SQUARE, o))
    for j, o in enumerate(ker.orders):
        label, doubled = _support_label(ker.gens.column(j), src_labels, f"ker[{j}]")
        annot = DOT if o else (CIRCLE if doubled else SQUARE)
        gens.append(Generator(label, annot, o))
    if not gens:
        return None
    exact = coker.is_zero() or ker.is_zero() or ker.group.is_free() or ker_torsion_covered
    return ChartEntry(tuple(gens), exact=exact)


def _blockwise_a(chart_list: list[Chart], d: Degree) -> IntMatrix:
    """Direct-sum a-multiplication matrix out of degree d."""
    cols: list[list[int]] = []
    row_offsets = []
    off = 0
    mats = []
    for c in chart_list:
        m = mult_map(c, "a", d)
        mats.append(m)
        row_offsets.append(off)
        off += m.rows
    total_rows = off
    for ci, m in enumerate(mats):
        for j in range(m.cols):
            col = [0] * total_rows
            for i in range(m.rows):
                col[row_offsets[ci] + i] = m[i, j]
            cols.append(col)
    return IntMatrix.from_columns(cols, total_rows)


def _torsion_covered_by_a(charts: list[Chart], to_tate: dict[Degree, list[IntMatrix]],
                          tate: Chart, ker: PresentedGroup, d: Degree) -> bool:
    """Do the order-2 kernel generators at d come from a-multiplication?

    A kernel class that is a times something lifts to a class a*x with
    2(a*x) = 0, which is what splits the extension; only order-2 torsion
    can be certified this way.
    """
    torsion_idx = [j for j, o in enumerate(ker.orders) if o]
    if not torsion_idx:
        return True
    if any(ker.orders[j] != 2 for j in torsion_idx):
        return False
    up = (d[0], d[1] + 1)
    for c in charts:
        if not c.window.contains(up):
            return False
    mats = to_tate.get(up)
    if mats is None:
        return False
    combined = mats[0]
    for m in mats[1:]:
        combined = combined.hstack(m)
    ker_up = presented_kernel(combined, _orders_concat(charts, up), tate.orders(up))
    try:
        amat = _blockwise_a([c for c in charts], up)
        induced_cols = [ker.express(amat.apply(ker_up.gens.column(j)))
                        for j in range(ker_up.gens.cols)]
    except Exception:
        return False
    induced = IntMatrix.from_columns(induced_cols, len(ker.orders))
    for j in torsion_idx:
        target = [1 if i == j else 0 for i in range(len(ker.orders))]
        if not image_contains(induced, ker.orders, target):
            return False
    return True


def _orders_concat(charts: list[Chart], d: Degree) -> tuple[int, ...]:
    out: list[int] = []
    for c in charts:
        out.extend(c.orders(d))
    return tuple(out)


def _labels_concat(charts: list[Chart], d: Degree) -> list[str]:
    out: list[str] = []
    for c in charts:
        e = c.entry(d)
        if e:
            out.extend(g.label for g in e.gens)
    return out


# ---------------------------------------------------------------------------
# homotopy orbits
# ---------------------------------------------------------------------------

def homotopy_orbits(hfp: Chart, tate: Chart,
                    loc_maps: dict[Degree, IntMatrix]) -> Chart:
    """Orbits from the long exact sequence through the localization map.

    At each degree the group sits between the cokernel one step to the
    right (integer direction) and the kernel at the degree itself.
    The attached a-multiplications are blockwise along that filtration
    (the associated-graded action), which is what the local-cohomology
    vanishing test consumes.
    """
    w = hfp.window
    out_w = Window(w.xmin, w.xmax - 1, w.ymin, w.ymax - 1)
    entries: dict[Degree, ChartEntry] = {}
    to_tate = {d: [loc_maps.get(d, IntMatrix.zero(len(tate.orders(d)),
                                                  len(hfp.orders(d))))]
               for d in w.degrees()}
    kers: dict[Degree, "object"] = {}
    cokers: dict[Degree, "object"] = {}
    for d in out_w.degrees():
        right = (d[0] + 1, d[1])
        ker = presented_kernel(to_tate[d][0], hfp.orders(d), tate.orders(d))
        coker = presented_cokernel(to_tate[right][0], tate.orders(right))
        covered = False
        if not coker.is_zero() and not ker.group.is_free():
            covered = _torsion_covered_by_a([hfp], to_tate, tate, ker, d)
        entry = _les_entry(coker, f"tow({d[0]},{d[1]})", ker,
                           _labels_concat([hfp], d), covered)
        if entry:
            entries[d] = entry
            kers[d] = ker
            cokers[d] = coker
    amaps = _filtration_a_maps(out_w, entries, kers, cokers,
                               lambda d: _blockwise_a([hfp], d),
                               lambda d: mult_map(tate, "a", (d[0] + 1, d[1])))
    return Chart(name=hfp.name + "-orbits", window=out_w, entries=entries,
                 maps={"a": amaps})


def _filtration_a_maps(window: Window, entries, kers, cokers,
                       a_on_sources, a_on_tate) -> dict[Degree, IntMatrix]:
    """Blockwise a-multiplication on entries built as coker-then-kernel."""
    amaps: dict[Degree, IntMatrix] = {}
    for d, entry in entries.items():
        down = (d[0], d[1] - 1)
        if not window.contains(down):
            continue
        target = entries.get(down)
        nt = len(target.gens) if target else 0
        if nt == 0 or not entry.gens:
            continue
        ker, coker = kers[d], cokers[d]
        tker = kers[down]
        tcoker = cokers[down]
        cols: list[list[int]] = []
        ok = True
        try:
            at = a_on_tate(d)
            for j in range(coker.gens.cols):
                img = at.apply(coker.gens.column(j))
                cc = tcoker.express(img)
                cols.append(cc + [0] * len(tker.orders))
            asrc = a_on_sources(d)
            for j in range(ker.gens.cols):
                img = asrc.apply(ker.gens.column(j))
                kk = tker.express(img)
                cols.append([0] * len(tcoker.orders) + kk)
        except Exception:
            ok = False
        if ok:
            amaps[d] = IntMatrix.from_columns(cols, nt)
    return amaps


# ---------------------------------------------------------------------------
# geometric fixed points
# ---------------------------------------------------------------------------

def geometric_fixed_points_with_maps(tate: Chart, connective_certificate: bool
                                     ) -> tuple[Chart, dict[Degree, IntMatrix]]:
    """Connective cover of the Tate chart, spread a-periodically.

    The integer line is truncated to non-negative degrees and copied up
    and down each column; this needs the input to really be a-periodic
    and the theory to be non-equivariantly connective (the caller's
    certificate), both enforced.  Also returns the per-degree inclusion
    into the Tate chart.
    """
    if not connective_certificate:
        raise TatePipelineError(
            "geometric fixed points need a connectivity certificate for the theory")
    w = tate.window
    if not (w.ymin <= 0 <= w.ymax):
        raise NotPeriodicError("window must contain the integer line")
    for x in range(w.xmin, w.xmax + 1):
        base = tate.group((x, w.ymin))
        for y in range(w.ymin, w.ymax + 1):
            if tate.group((x, y)) != base:
                raise NotPeriodicError(f"input chart is not a-periodic at x = {x}")
    entries: dict[Degree, ChartEntry] = {}
    amaps: dict[Degree, IntMatrix] = {}
    phi_maps: dict[Degree, IntMatrix] = {}
    for x in range(max(0, w.xmin), w.xmax + 1):
        line = tate.entry((x, 0))
        if line is None:
            continue
        gens = tuple(Generator(f"ph({g.label})", g.annotation, g.order)
                     for g in line.gens)
        e = ChartEntry(gens)
        n = len(gens)
        for y in range(w.ymin, w.ymax + 1):
            entries[(x, y)] = e
            phi_maps[(x, y)] = IntMatrix.identity(n)
            if y > w.ymin:
                amaps[(x, y)] = IntMatrix.identity(n)
    chart = Chart(name=tate.name + "-phi", window=w, entries=entries,
                  maps={"a": amaps})
    return chart, phi_maps


def geometric_fixed_points(tate: Chart, connective_certificate: bool) -> Chart:
    return geometric_fixed_points_with_maps(tate, connective_certificate)[0]


# ---------------------------------------------------------------------------
# the genuine chart
# ---------------------------------------------------------------------------

def assemble_genuine(hfp: Chart, tate: Chart, phi: Chart,
                     loc_maps: dict[Degree, IntMatrix],
                     phi_maps: dict[Degree, IntMatrix],
                     window: Window, name: str,
                     on_ambiguous: str = "flag") -> Chart:
    """Mayer-Vietoris assembly over the pullback square.

    Degreewise: the kernel of (hfp + phi -> tate) plus the cokernel one
    step to the right.  Wherever both contribute, the entry is exact if
    the kernel part is free or its order-2 generators are a-multiples;
    otherwise it is flagged (or raised, with on_ambiguous="raise").
    """
    w = hfp.window
    if not (w.contains((window.xmin, window.ymin))
            and w.contains((window.xmax + 1, window.ymax + 1))):
        raise TatePipelineError("input charts need one degree of margin around the window")
    entries: dict[Degree, ChartEntry] = {}

    def combined_at(d: Degree) -> IntMatrix:
        nt = len(tate.orders(d))
        lm = loc_maps.get(d, IntMatrix.zero(nt, len(hfp.orders(d))))
        pm = phi_maps.get(d, IntMatrix.zero(nt, len(phi.orders(d))))
        neg = IntMatrix.from_rows([[-x for x in pm.row(i)] for i in range(pm.rows)]) \
            if pm.rows else pm
        return lm.hstack(neg)

    to_tate = {d: [loc_maps.get(d, IntMatrix.zero(len(tate.orders(d)), len(hfp.orders(d)))),
                   phi_maps.get(d, IntMatrix.zero(len(tate.orders(d)), len(phi.orders(d))))]
               for d in w.degrees()}

    kers: dict[Degree, PresentedGroup] = {}
    cokers: dict[Degree, PresentedGroup] = {}
    for d in window.degrees():
        right = (d[0] + 1, d[1])
        ker = presented_kernel(combined_at(d), _orders_concat([hfp, phi], d),
                               tate.orders(d))
        coker = presented_cokernel(combined_at(right), tate.orders(right))
        covered = False
        if not coker.is_zero() and not ker.group.is_free():
            covered = _torsion_covered_by_a([hfp, phi], to_tate, tate, ker, d)
        entry = _les_entry(coker, f"tow({d[0]},{d[1]})", ker,
                           _labels_concat([hfp, phi], d), covered)
        if entry:
            if not entry.exact and on_ambiguous == "raise":
                raise TatePipelineError(
                    f"extension ambiguity at {d}: kernel {ker.group} under "
                    f"cokernel {coker.group}")
            entries[d] = entry
            kers[d] = ker
            cokers[d] = coker
    amaps = _filtration_a_maps(window, entries, kers, cokers,
                               lambda d: _blockwise_a([hfp, phi], d),
                               lambda d: mult_map(tate, "a", (d[0] + 1, d[1])))
    return Chart(name=name, window=window, entries=entries, maps={"a": amaps})


def run_tate_square(hfp: Chart, connective: bool, window: Window,
                    name: str) -> TateSquareData:
    """All five charts of the square from a homotopy-fixed-point chart."""
    tate, loc = invert_a_with_maps(hfp)
    orbits = homotopy_orbits(hfp, tate, loc)
    phi, phi_maps = geometric_fixed_points_with_maps(tate, connective)
    genuine = assemble_genuine(hfp, tate, phi, loc, phi_maps, window, name)
    return TateSquareData(hfp=hfp, tate=tate, orbits=orbits, phi=phi,
                          genuine=genuine, loc_maps=loc, phi_maps=phi_maps)
