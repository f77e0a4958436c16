"""The Tate square: localization, orbits, fixed points, assembly."""

import pytest

from roqcharts.exactalg import FgAbelian, IntMatrix
from roqcharts.grading import Chart, ChartEntry, Generator, Window, SQUARE
from roqcharts.tate import (StabilizationError, TatePipelineError,
                            assemble_genuine, geometric_fixed_points,
                            invert_a, _les_entry)
from roqcharts.exactalg import PresentedGroup
from roqcharts.theories import hz_seed, kr_seed, run_tate_pipeline
from roqcharts.chartio import diff
from roqcharts.grading import closed_form_hz, closed_form_kr

Z = FgAbelian.free(1)
F2 = FgAbelian.cyclic(2)


def single_class_chart(window=Window(-3, 3, -3, 3)):
    entries = {(0, 0): ChartEntry((Generator("x", SQUARE, 0),))}
    return Chart(name="one", window=window, entries=entries, maps={"a": {}})


def test_invert_a_kills_nilpotent_chart():
    # one Z at the origin with zero a-multiplication inverts to nothing
    tate = invert_a(single_class_chart())
    assert not tate.entries


def test_invert_a_is_a_periodic_and_idempotent():
    data = run_tate_pipeline(hz_seed(), Window.square(6), padding=2)
    t = data.tate
    for x in range(t.window.xmin, t.window.xmax + 1):
        base = t.group((x, t.window.ymin))
        for y in range(t.window.ymin, t.window.ymax + 1):
            assert t.group((x, y)) == base
    again = invert_a(t)
    assert all(again.group(d) == t.group(d) for d in again.window.degrees())


def test_invert_a_instability_error():
    # a column of Z's with multiplication by 2 never stabilizes
    w = Window(0, 0, -3, 0)
    entries = {(0, y): ChartEntry((Generator("g", SQUARE, 0),))
               for y in range(-3, 1)}
    amaps = {(0, y): IntMatrix.from_rows([[2]]) for y in range(-2, 1)}
    chart = Chart(name="bad", window=w, entries=entries, maps={"a": amaps})
    with pytest.raises(StabilizationError):
        invert_a(chart)


def test_localization_maps_hit_the_colimit():
    data = run_tate_pipeline(hz_seed(), Window.square(6), padding=2)
    # on the antidiagonal the map is reduction of Z onto Z/2
    assert data.loc_maps[(0, 0)].entries == ((1,),)
    # above the antidiagonal nothing maps anywhere (source is zero)
    assert data.loc_maps[(0, 3)].cols == 0


def test_orbits_patterns_hz():
    data = run_tate_pipeline(hz_seed(), Window.square(8), padding=2)
    ob = data.orbits
    for d in ob.window.degrees():
        x, y = d
        if x % 2 == 0:
            expect = Z if y == -x else FgAbelian.zero()
        else:
            expect = F2 if y >= -x else FgAbelian.zero()
        assert ob.group(d) == expect, d
    # the kernel generators are twice the fixed-point ones
    assert any(g.annotation == "circle" for g in ob.entry((0, 0)).gens)


def test_orbits_trivial_when_tate_vanishes():
    # with a zero localization target the orbits are just the fixed points
    hfp = single_class_chart()
    tate = Chart(name="zero", window=hfp.window, entries={}, maps={"a": {}})
    from roqcharts.tate import homotopy_orbits
    orbits = homotopy_orbits(hfp, tate, {})
    assert orbits.group((0, 0)) == Z


def test_geometric_fixed_points_requires_certificate():
    data = run_tate_pipeline(hz_seed(), Window.square(4), padding=2)
    with pytest.raises(TatePipelineError):
        geometric_fixed_points(data.tate, False)


def test_geometric_fixed_points_requires_periodicity():
    from roqcharts.tate import NotPeriodicError
    with pytest.raises(NotPeriodicError):
        geometric_fixed_points(single_class_chart(), True)


def test_phi_integer_line_connective():
    for seed, step in ((hz_seed(), 2), (kr_seed(), 4)):
        data = run_tate_pipeline(seed, Window.square(8), padding=2)
        p = data.phi
        for x in range(p.window.xmin, 0):
            assert p.group((x, 0)).is_zero()
        for x in range(0, p.window.xmax + 1):
            expect = F2 if x % step == 0 else FgAbelian.zero()
            assert p.group((x, 0)) == expect


def test_degenerate_square_returns_fixed_points():
    data = run_tate_pipeline(hz_seed(), Window.square(6), padding=2)
    hfp, tate = data.hfp, data.tate
    ident = {d: IntMatrix.identity(len(tate.orders(d)))
             for d in tate.window.degrees()}
    w = Window.square(4)
    genuine = assemble_genuine(hfp, tate, tate, data.loc_maps, ident, w, "degen")
    for d in w.degrees():
        assert genuine.group(d) == hfp.group(d), d


def test_les_entry_flags_unresolvable_extension():
    coker = PresentedGroup.from_lattices(IntMatrix.identity(1),
                                         IntMatrix.from_rows([[2]]))
    ker = PresentedGroup.from_lattices(IntMatrix.identity(1),
                                       IntMatrix.from_rows([[2]]))
    entry = _les_entry(coker, "tow", ker, ["g"], ker_torsion_covered=False)
    assert not entry.exact
    entry2 = _les_entry(coker, "tow", ker, ["g"], ker_torsion_covered=True)
    assert entry2.exact


def test_round_trip_both_theories():
    w = Window.square(8)
    hz = run_tate_pipeline(hz_seed(), w, padding=2)
    assert diff(hz.genuine, closed_form_hz(w)).clean
    kr = run_tate_pipeline(kr_seed(), w, padding=2)
    assert diff(kr.genuine, closed_form_kr(w)).clean
    assert all(e.exact for e in kr.genuine.entries.values())


def test_local_cohomology_vanishing():
    for seed in (hz_seed(), kr_seed()):
        data = run_tate_pipeline(seed, Window.square(6), padding=2)
        assert not invert_a(data.orbits).entries
