"""Trigraded multiplicative spectral-sequence pages on monomial bases.

A page presentation is a free-commutative monomial alphabet with
tridegrees (s, t, b); a class at (s, t, b) shows up in the chart at
(s + t, b).  Differential rounds are given on single generators (or on a
power of one, for derived classes like the square of an invertible
generator), extended to all monomials by the Leibniz rule with the
Koszul sign taken on total degree s + t, and consumed by page turns that
replace every tridegree's group by exact homology.

Spot states are computed lazily and memoized, so any tridegree can be
inspected exactly: the evaluator recurses through the applied rounds and
enumerates the finitely many monomials at each tridegree it touches.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactalg import (FgAbelian, IntMatrix, PresentedGroup, column_space_basis,
                       has_nonzero_hom, kernel_basis, lattice_contains)
from .grading import Chart, ChartEntry, Degree, Generator, Window, DOT, SQUARE


TriDegree = tuple[int, int, int]
Mono = tuple[int, ...]


class SpecSeqError(Exception):
    pass


class PresentationError(SpecSeqError):
    pass


class DifferentialError(SpecSeqError):
    """Degree-inconsistent assignment or a Leibniz failure (d o d != 0)."""


class CollapseError(SpecSeqError):
    """The page cannot be read off as a chart (remaining differential,
    filtration collision, or an unconfirmed vanishing band)."""


@dataclass(frozen=True)
class PageGenerator:
    name: str
    tridegree: TriDegree
    invertible: bool = False


@dataclass(frozen=True)
class Presentation:
    """Alphabet with tridegrees.

    Enumeration of the monomials at a fixed tridegree must terminate, so
    the generators are constrained: at most one invertible generator,
    with s = 0, t + b = 0 and s + t != 0; every other generator needs
    s <= 0, t + b >= 0 and (-s) + (t + b) >= 1.  Both theories in scope
    fit, and anything else is rejected up front rather than looping.
    """

    generators: tuple[PageGenerator, ...]

    def __post_init__(self):
        inv = [g for g in self.generators if g.invertible]
        if len(inv) > 1:
            raise PresentationError("at most one invertible generator is supported")
        for g in inv:
            s, t, b = g.tridegree
            if s != 0 or t + b != 0 or s + t == 0:
                raise PresentationError(
                    f"invertible generator {g.name} must have s = 0, t + b = 0, s + t != 0")
        for g in self.generators:
            if g.invertible:
                continue
            s, t, b = g.tridegree
            if s > 0 or t + b < 0 or (-s) + (t + b) < 1:
                raise PresentationError(
                    f"generator {g.name} breaks monomial finiteness (needs s <= 0, "
                    f"t + b >= 0, strictly one of them)")

    def index(self, name: str) -> int:
        for i, g in enumerate(self.generators):
            if g.name == name:
                return i
        raise PresentationError(f"unknown generator {name!r}")

    def mono(self, powers: dict[str, int]) -> Mono:
        e = [0] * len(self.generators)
        for name, p in powers.items():
            e[self.index(name)] = p
        return tuple(e)

    def tridegree_of(self, mono: Mono) -> TriDegree:
        s = t = b = 0
        for e, g in zip(mono, self.generators):
            s += e * g.tridegree[0]
            t += e * g.tridegree[1]
            b += e * g.tridegree[2]
        return (s, t, b)

    def shadow_of(self, mono: Mono) -> Degree:
        s, t, b = self.tridegree_of(mono)
        return (s + t, b)

    def mono_str(self, mono: Mono, coeff: int = 1) -> str:
        parts = []
        if coeff not in (1,):
            parts.append(str(coeff))
        for e, g in zip(mono, self.generators):
            if e == 1:
                parts.append(g.name)
            elif e != 0:
                parts.append(f"{g.name}^{e}")
        return " ".join(parts) if parts else "1"


@dataclass(frozen=True)
class DifferentialRule:
    """d(source) = coeff * target, everything else a cycle.

    label is the page number the round is displayed as; the honest
    tridegree shift is inferred from source and target and must have the
    differential shape (-r, r-1, 0).
    """

    label: int
    source: tuple[tuple[str, int], ...]
    coeff: int
    target: tuple[tuple[str, int], ...]

    def source_dict(self) -> dict[str, int]:
        return dict(self.source)

    def target_dict(self) -> dict[str, int]:
        return dict(self.target)


def rule_shift(pres: Presentation, rule: DifferentialRule) -> tuple[int, TriDegree]:
    src = pres.mono(rule.source_dict())
    dst = pres.mono(rule.target_dict())
    st, sb = pres.tridegree_of(src), pres.tridegree_of(dst)
    shift = (sb[0] - st[0], sb[1] - st[1], sb[2] - st[2])
    r = -shift[0]
    if r < 1 or shift != (-r, r - 1, 0):
        raise DifferentialError(
            f"assignment d({pres.mono_str(src)}) = {pres.mono_str(dst, rule.coeff)} "
            f"has shift {shift}, not of the form (-r, r-1, 0)")
    return r, shift


def _add_tri(a: TriDegree, b: TriDegree) -> TriDegree:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _sub_tri(a: TriDegree, b: TriDegree) -> TriDegree:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


@dataclass(frozen=True)
class SpotState:
    """One tridegree of one page: monomial basis plus cycle and boundary
    lattices in those coordinates, presented as a group."""

    monomials: tuple[Mono, ...]
    cycles: IntMatrix
    bounds: IntMatrix
    pres: PresentedGroup

    @property
    def group(self) -> FgAbelian:
        return self.pres.group


def _free_state(monomials: tuple[Mono, ...]) -> SpotState:
    n = len(monomials)
    return SpotState(monomials, IntMatrix.identity(n), IntMatrix.zero(n, 0),
                     PresentedGroup.full_free(n))


_EMPTY_STATE = SpotState((), IntMatrix.zero(0, 0), IntMatrix.zero(0, 0),
                         PresentedGroup.zero(0))


_MONO_MEMO: dict[tuple, dict[TriDegree, tuple[Mono, ...]]] = {}
_STATE_MEMO: dict[tuple, dict[tuple[int, TriDegree], SpotState]] = {}


class Page:
    """A spectral-sequence page for a presentation, with applied rounds
    and at most one pending differential round."""

    def __init__(self, pres: Presentation, rounds: tuple[DifferentialRule, ...] = (),
                 pending: DifferentialRule | None = None):
        self.pres = pres
        self.rounds = rounds
        self.pending = pending
        self._mono_memo = _MONO_MEMO.setdefault(pres.generators, {})
        self._state_memo = _STATE_MEMO.setdefault((pres.generators, rounds), {})
        self._rule_memo: dict[DifferentialRule, tuple[Mono, Mono, int, int]] = {}

    # -- monomial enumeration ------------------------------------------------

    def monomials_at(self, tri: TriDegree) -> tuple[Mono, ...]:
        cached = self._mono_memo.get(tri)
        if cached is not None:
            return cached
        gens = self.pres.generators
        noninv = [i for i, g in enumerate(gens) if not g.invertible]
        inv = [i for i, g in enumerate(gens) if g.invertible]
        # residual feasibility per suffix: can later generators still move
        # the s-residual (each has s <= 0) or the t+b-residual (each >= 0)?
        suffix_s = [False] * (len(noninv) + 1)
        suffix_tb = [False] * (len(noninv) + 1)
        for pos in range(len(noninv) - 1, -1, -1):
            s_i, t_i, b_i = gens[noninv[pos]].tridegree
            suffix_s[pos] = suffix_s[pos + 1] or s_i < 0
            suffix_tb[pos] = suffix_tb[pos + 1] or (t_i + b_i) > 0
        found: list[Mono] = []
        expo = [0] * len(gens)

        def rec(pos: int, rs: int, rt: int, rb: int):
            # rs, rt, rb: what the remaining generators must still contribute
            if rs > 0 or (rs < 0 and not suffix_s[pos]):
                return
            if (rt + rb) < 0 or ((rt + rb) > 0 and not suffix_tb[pos]):
                return
            if pos == len(noninv):
                if rs != 0:
                    return
                if inv:
                    i = inv[0]
                    _, lt, lb = gens[i].tridegree
                    if rt % lt:
                        return
                    j = rt // lt
                    if rb == j * lb:
                        expo[i] = j
                        found.append(tuple(expo))
                        expo[i] = 0
                else:
                    if rt == 0 and rb == 0:
                        found.append(tuple(expo))
                return
            i = noninv[pos]
            gs, gt, gb = gens[i].tridegree
            tb = gt + gb
            emax = None
            if gs < 0:
                emax = rs // gs  # rs <= 0, so this is |rs| / |gs|
            if tb > 0:
                cap = (rt + rb) // tb
                emax = cap if emax is None else min(emax, cap)
            for e in range(0, emax + 1):
                expo[i] = e
                rec(pos + 1, rs - e * gs, rt - e * gt, rb - e * gb)
            expo[i] = 0

        if not gens:
            found = [()] if tri == (0, 0, 0) else []
        else:
            rec(0, tri[0], tri[1], tri[2])
        out = tuple(sorted(found))
        self._mono_memo[tri] = out
        return out

    @property
    def page_label(self) -> int:
        if self.rounds:
            return self.rounds[-1].label + 1
        return 1

    # -- the Leibniz differential ---------------------------------------------

    def _rule_data(self, rule: DifferentialRule) -> tuple[Mono, Mono, int, int]:
        cached = self._rule_memo.get(rule)
        if cached is not None:
            return cached
        pres = self.pres
        key = pres.mono(rule.source_dict())
        image = pres.mono(rule.target_dict())
        support = [i for i, e in enumerate(key) if e]
        if len(support) != 1:
            raise DifferentialError("differential keys on a single generator power only")
        st, tt, _ = pres.tridegree_of(key)
        data = (key, image, support[0], (st + tt) % 2)
        self._rule_memo[rule] = data
        return data

    def _apply_rule(self, rule: DifferentialRule, mono: Mono) -> tuple[int, Mono] | None:
        """d on one monomial; None means zero, an exception means the
        monomial does not factor as key-power times declared cycles."""
        key, image, i, parity = self._rule_data(rule)
        q, rem = divmod(mono[i], key[i])
        if rem:
            raise DifferentialError(
                f"d undefined on {self.pres.mono_str(mono)}: leftover factor of "
                f"{self.pres.generators[i].name} is not a declared cycle")
        c = (q % 2) if parity else q
        if c == 0:
            return None
        out = list(mono)
        for k in range(len(out)):
            out[k] = out[k] - key[k] + image[k]
        return (c * rule.coeff, tuple(out))

    def _diff_matrix(self, rule: DifferentialRule, src_monos: tuple[Mono, ...],
                     dst_monos: tuple[Mono, ...]) -> tuple[IntMatrix, set[int]]:
        """Ambient matrix of d and the set of undefined source columns."""
        index = {m: i for i, m in enumerate(dst_monos)}
        rows = [[0] * len(src_monos) for _ in dst_monos]
        undefined: set[int] = set()
        for col, m in enumerate(src_monos):
            try:
                img = self._apply_rule(rule, m)
            except DifferentialError:
                undefined.add(col)
                continue
            if img is None:
                continue
            coeff, mono = img
            if mono not in index:
                raise DifferentialError(
                    f"image {self.pres.mono_str(mono)} missing from its tridegree "
                    f"(enumeration bug)")
            rows[index[mono]][col] = coeff
        mat = (IntMatrix.from_rows(rows) if dst_monos
               else IntMatrix.zero(0, len(src_monos)))
        return mat, undefined

    @staticmethod
    def _check_defined(mat_cols: IntMatrix, undefined: set[int], what: str,
                       pres: Presentation, monos: tuple[Mono, ...]):
        if not undefined:
            return
        for j in range(mat_cols.cols):
            for i in undefined:
                if mat_cols[i, j] != 0:
                    raise DifferentialError(
                        f"d undefined on live class involving "
                        f"{pres.mono_str(monos[i])} ({what})")

    # -- state evaluation ------------------------------------------------------

    def state(self, tri: TriDegree, depth: int | None = None) -> SpotState:
        if depth is None:
            depth = len(self.rounds)
        key = (depth, tri)
        cached = self._state_memo.get(key)
        if cached is not None:
            return cached
        monos = self.monomials_at(tri)
        if not monos:
            self._state_memo[key] = _EMPTY_STATE
            return _EMPTY_STATE
        if depth == 0:
            st = _free_state(monos)
            self._state_memo[key] = st
            return st

        rule = self.rounds[depth - 1]
        _, shift = rule_shift(self.pres, rule)
        here = self.state(tri, depth - 1)
        below = self.state(_sub_tri(tri, shift), depth - 1)
        above = self.state(_add_tri(tri, shift), depth - 1)

        # new cycles: x in cycles with d(x) a boundary upstairs
        dmat, undef = self._diff_matrix(rule, here.monomials, above.monomials)
        self._check_defined(here.cycles, undef, "cycle basis", self.pres, here.monomials)
        imgs = dmat.mul(here.cycles)
        if imgs.is_zero():
            new_cycles = here.cycles
        else:
            big = imgs.hstack(above.bounds)
            kb = kernel_basis(big)
            k = here.cycles.cols
            proj = IntMatrix.from_rows([[kb[i, j] for j in range(kb.cols)] for i in range(k)])
            coords = column_space_basis(proj)
            new_cycles = here.cycles.mul(coords)

        # new boundaries: old ones plus images of cycles downstairs
        pieces = here.bounds
        grew = False
        if below.monomials:
            dn, undef_dn = self._diff_matrix(rule, below.monomials, here.monomials)
            self._check_defined(below.cycles, undef_dn, "incoming cycle basis",
                                self.pres, below.monomials)
            incoming = dn.mul(below.cycles)
            if not incoming.is_zero():
                # the square-zero law, checked on everything that arrives
                for j in range(incoming.cols):
                    v = incoming.column(j)
                    dd = dmat.apply(v)
                    if above.monomials and not lattice_contains(above.bounds, dd):
                        raise DifferentialError(
                            f"d o d != 0 at tridegree {tri}: witness column of "
                            f"{self.pres.mono_str(below.monomials[0])}-span")
                    if not above.monomials and any(dd):
                        raise DifferentialError(f"d o d != 0 at tridegree {tri}")
                pieces = pieces.hstack(incoming)
                grew = True
        if new_cycles is here.cycles and not grew:
            self._state_memo[key] = here
            return here
        new_bounds = column_space_basis(pieces) if grew else here.bounds
        st = SpotState(monos, new_cycles, new_bounds,
                       PresentedGroup.from_lattices(new_cycles, new_bounds))
        self._state_memo[key] = st
        return st

    def group_at(self, tri: TriDegree) -> FgAbelian:
        return self.state(tri).group

    def is_cycle(self, powers: dict[str, int]) -> bool:
        """Whether the monomial survives as a class of the current page
        (its unit vector lies in the iterated cycle lattice)."""
        mono = self.pres.mono(powers)
        st = self.state(self.pres.tridegree_of(mono))
        if mono not in st.monomials:
            return False
        vec = [1 if m == mono else 0 for m in st.monomials]
        return lattice_contains(st.cycles, vec)

    def differential_matrix(self, tri: TriDegree) -> IntMatrix:
        """Matrix of the pending differential out of a tridegree, in the
        current page's generator coordinates."""
        if self.pending is None:
            raise DifferentialError("no differential has been set on this page")
        _, shift = rule_shift(self.pres, self.pending)
        here = self.state(tri)
        there = self.state(_add_tri(tri, shift))
        dmat, undef = self._diff_matrix(self.pending, here.monomials, there.monomials)
        self._check_defined(here.pres.gens, undef, "page basis", self.pres, here.monomials)
        cols = []
        for j in range(here.pres.gens.cols):
            cols.append(there.pres.express(dmat.apply(here.pres.gens.column(j))))
        return IntMatrix.from_columns(cols, len(there.pres.orders))


def page_from_presentation(pres: Presentation) -> Page:
    """The first page: every monomial a free generator, nothing applied."""
    return Page(pres)


def set_differential(page: Page, rule: DifferentialRule,
                     check_window: Window | None = None) -> Page:
    """Attach one differential round (errors on a malformed shift).

    With check_window, the square-zero law is verified eagerly over every
    tridegree whose chart shadow lies in the window, by forcing the turn
    there; otherwise validation happens on evaluation.
    """
    if page.pending is not None:
        raise DifferentialError("a differential is already pending; turn the page first")
    rule_shift(page.pres, rule)
    out = Page(page.pres, page.rounds, pending=rule)
    out._mono_memo = page._mono_memo
    if check_window is not None:
        probe = Page(page.pres, page.rounds + (rule,))
        probe._mono_memo = page._mono_memo
        for d in check_window.degrees():
            for tri in shadow_tridegrees(probe, d, depth=8):
                probe.state(tri)
    return out


def turn_page(page: Page) -> Page:
    """Consume the pending differential: every tridegree becomes the
    homology of the old page there."""
    if page.pending is None:
        raise DifferentialError("no differential to turn; set one first")
    out = Page(page.pres, page.rounds + (page.pending,))
    out._mono_memo = page._mono_memo
    return out


def _scan_floor(d: Degree, depth: int) -> int:
    x, y = d
    return -(max(0, -(x + y)) + depth)


def shadow_tridegrees(page: Page, d: Degree, depth: int) -> list[TriDegree]:
    """Tridegrees with chart shadow d and a nonempty monomial basis,
    scanned from filtration 0 downward.

    depth controls how far below the last structural bound the scan
    looks; the collapse routine separately certifies a zero band.
    """
    x, y = d
    out = []
    for s in range(0, _scan_floor(d, depth) - 1, -1):
        tri = (s, x - s, y)
        if page.monomials_at(tri):
            out.append(tri)
    return out


def find_candidates(page: Page, window: Window, depth: int = 16,
                    r_cap: int = 16) -> list[tuple[int, TriDegree, TriDegree]]:
    """Exhaustive search for places a later differential could be nonzero.

    For every nonzero in-window spot and every differential shape d_r up
    to r_cap, report the pairs where the target group admits a nonzero
    homomorphism from the source.  An empty list is the collapse
    certificate the pipelines rely on.
    """
    found = []
    for d in window.degrees():
        for tri in shadow_tridegrees(page, d, depth):
            g = page.state(tri).group
            if g.is_zero():
                continue
            for r in range(1, r_cap + 1):
                target = _add_tri(tri, (-r, r - 1, 0))
                if not page.monomials_at(target):
                    continue
                h = page.state(target).group
                if has_nonzero_hom(g, h):
                    found.append((r, tri, target))
    return found


def collapse_to_chart(page: Page, window: Window, name: str,
                      label_of=None, map_monos: dict[str, dict[str, int]] | None = None,
                      depth: int = 16, band: int = 4,
                      r_cap: int = 16) -> Chart:
    """Read the page off as an RO(Q)-graded chart.

    Requires: no pending differential, no remaining differential
    candidates in the window, at most one nonzero filtration per degree,
    and a zero band at the bottom of every filtration scan (so the scan
    depth provably did not cut off contributions for these theories).
    Structure maps are computed by multiplying representatives by the
    given monomials.
    """
    if page.pending is not None:
        raise CollapseError("page still carries an unconsumed differential")
    leftovers = find_candidates(page, window, depth=depth, r_cap=r_cap)
    if leftovers:
        r, src, dst = leftovers[0]
        raise CollapseError(
            f"possible nonzero d_{r} remains from {src} to {dst} "
            f"({len(leftovers)} candidate pairs in window)")

    spot_of: dict[Degree, TriDegree] = {}
    entries: dict[Degree, ChartEntry] = {}
    for d in window.degrees():
        tris = shadow_tridegrees(page, d, depth)
        live = [t for t in tris if not page.state(t).group.is_zero()]
        # zero-band certificate: the bottom `band` filtrations of the scan
        # must be zero, so the cutoff provably lost nothing nearby
        floor = _scan_floor(d, depth)
        for s in range(floor, min(floor + band, 1)):
            tri = (s, d[0] - s, d[1])
            if page.monomials_at(tri) and not page.state(tri).group.is_zero():
                raise CollapseError(
                    f"no zero band at the bottom of the filtration scan for {d}; "
                    f"increase depth (nonzero at {tri})")
        if not live:
            continue
        if len(live) > 1:
            raise CollapseError(f"degree {d} is spread over filtrations {live}")
        tri = live[0]
        st = page.state(tri)
        gens = []
        for j in range(st.pres.gens.cols):
            vec = st.pres.gens.column(j)
            order = st.pres.orders[j]
            label = _rep_label(page.pres, st.monomials, vec, label_of)
            gens.append(Generator(label, DOT if order else SQUARE, order))
        entries[d] = ChartEntry(tuple(gens))
        spot_of[d] = tri

    chart = Chart(name=name, window=window, entries=entries, maps={})
    for mname, powers in (map_monos or {}).items():
        mono = page.pres.mono(powers)
        mshift = page.pres.tridegree_of(mono)
        dx, dy = mshift[0] + mshift[1], mshift[2]
        per: dict[Degree, IntMatrix] = {}
        for d, tri in spot_of.items():
            target_deg = (d[0] + dx, d[1] + dy)
            if target_deg not in spot_of or not window.contains(target_deg):
                continue
            if spot_of[target_deg] != _add_tri(tri, mshift):
                continue  # product lands in a different filtration: zero here
            src = page.state(tri)
            dst = page.state(spot_of[target_deg])
            index = {m: i for i, m in enumerate(dst.monomials)}
            cols = []
            for j in range(src.pres.gens.cols):
                vec = src.pres.gens.column(j)
                out = [0] * len(dst.monomials)
                for i, c in enumerate(vec):
                    if c == 0:
                        continue
                    prod = tuple(e1 + e2 for e1, e2 in zip(src.monomials[i], mono))
                    out[index[prod]] += c
                cols.append(dst.pres.express(out))
            per[d] = IntMatrix.from_columns(cols, len(dst.pres.orders))
        chart.maps[mname] = per
    return chart


def _rep_label(pres: Presentation, monos: tuple[Mono, ...], vec: list[int],
               label_of) -> str:
    support = [(i, c) for i, c in enumerate(vec) if c]
    if len(support) == 1:
        i, c = support[0]
        if label_of is not None:
            return label_of(monos[i], abs(c))
        return pres.mono_str(monos[i], abs(c))
    return "(" + " + ".join(pres.mono_str(monos[i], c) for i, c in support) + ")"
