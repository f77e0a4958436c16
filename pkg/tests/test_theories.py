"""Seeds, the theta operation, the Bockstein run, slices, checkers."""

import pytest

from roqcharts.exactalg import FgAbelian
from roqcharts.grading import (Window, closed_form_hz, closed_form_kr,
                               hz_degree)
from roqcharts.chartio import diff, parse_seed, serialize_seed
from roqcharts.theories import (TheoryError, bss_floor_survivors,
                                bss_to_sss, connectivity_check, gap_check,
                                hfpss_collapse_certificates, hz_seed,
                                inject_class, kr_seed, run_bockstein,
                                run_hfpss, run_tate_pipeline, seed_from_spec,
                                sss_entry_e1, sss_entry_einf, sss_to_bss,
                                theta_apply)

Z = FgAbelian.free(1)
F2 = FgAbelian.cyclic(2)


# ---------------------------------------------------------------------------
# seeds
# ---------------------------------------------------------------------------

def test_seeds_parse_from_declarative_text():
    hz = hz_seed()
    assert hz.name == "hz" and hz.connective
    assert [g.name for g in hz.presentation.generators] == ["a", "lam"]
    kr = kr_seed()
    assert len(kr.rules) == 2
    assert kr.rules[1].target == (("a", 3), ("vb", 1))


def test_seed_round_trip_through_text():
    spec = parse_seed(serialize_seed(parse_seed(
        "roqcharts-seed v1\nname: toy\ngenerator: a -1 1 -1\n"
        "generator: lam 0 1 -1 invertible\ndifferential: 1 | lam -> 2 a\n"
        "connective: yes\n")))
    seed = seed_from_spec(spec)
    chart = run_hfpss(seed, Window.square(3))
    assert chart.group((0, 0)) == Z
    assert chart.group((0, -1)) == F2


# ---------------------------------------------------------------------------
# fixed points
# ---------------------------------------------------------------------------

def test_hfpss_examples():
    hz = run_hfpss(hz_seed(), Window.square(6))
    assert hz.group((0, -1)) == F2
    assert hz.group((-2, 2)) == Z
    kr = run_hfpss(kr_seed(), Window.square(9))
    assert kr.group((1, 0)) == F2
    assert kr.entry((1, 0)).gens[0].label == "a vb"
    assert kr.group((8, -8)) == Z
    assert [str(kr.group((n, 0))) for n in range(9)] == \
        ["Z", "Z/2", "Z/2", "0", "Z", "0", "0", "0", "Z"]
    # derived codegree classes on the negative axis keep their usual names
    assert hz.entry((-2, 0)).gens[0].label == "a^2 u^-1"
    assert kr.entry((-4, 0)).gens[0].label == "a^4 U^-1"


def test_collapse_certificates_empty():
    for seed in (hz_seed(), kr_seed()):
        for label, cands in hfpss_collapse_certificates(seed, Window.square(8)):
            assert cands == [], (seed.name, label)


# ---------------------------------------------------------------------------
# theta
# ---------------------------------------------------------------------------

def test_theta_values():
    assert theta_apply(("usq", 1)) == ("ucol", 3, 0)          # u -> a^3
    assert theta_apply(("usq", 2)) is None                     # u^2 -> 0
    assert theta_apply(("ucol", 2, 3)) == ("ucol", 5, 2)       # a^2 u^3 -> a^5 u^2
    assert theta_apply(("ucirc", 1)) is None                   # 2u^-1 -> 0
    assert theta_apply(("utow", 1, 6)) == ("utow", 2, 5)
    assert theta_apply(("utow", 1, 5)) is None                 # stub survives
    assert theta_apply(("utow", 2, 9)) is None                 # even towers are cycles


def test_theta_degree_and_square():
    w = Window.square(12)
    for d in w.degrees():
        from roqcharts.grading import hz_summands
        for desc in hz_summands(d[0], d[1]):
            img = theta_apply(desc)
            if img is None:
                continue
            src, dst = hz_degree(desc), hz_degree(img)
            assert (dst[0] - src[0], dst[1] - src[1]) == (-2, -1)
            assert theta_apply(img) is None


def test_theta_unknown_generator_rejected():
    with pytest.raises(TheoryError):
        theta_apply(("mystery", 1))


# ---------------------------------------------------------------------------
# the Bockstein run
# ---------------------------------------------------------------------------

def test_bockstein_matches_closed_form():
    w = Window.square(12)
    res = run_bockstein(w)
    assert res.candidates == []
    assert diff(res.chart, closed_form_kr(w)).clean
    assert all(e.exact for e in res.chart.entries.values())


def test_bockstein_named_survivors():
    w = Window.square(6)
    res = run_bockstein(w)
    e = res.chart.entry((1, 0))
    assert e.group == F2 and e.gens[0].label == "vh a"
    e4 = res.chart.entry((4, 0))
    assert e4.group == Z and e4.gens[0].annotation == "circle"
    assert e4.gens[0].label == "2 vh^2 u"
    for d in [(0, 1), (-1, 1), (-2, 1), (1, 2), (0, 2), (-1, 2)]:
        assert res.chart.group(d).is_zero()


def test_bockstein_absorbs_stub_tops():
    res = run_bockstein(Window.square(8))
    degrees = {d for d, _ in res.absorbed}
    assert (-7, 9) not in degrees  # outside window
    assert (-3, 5) in degrees      # vbar square over the first stub top
    assert res.chart.group((-3, 5)) == Z


def test_bockstein_floor_zero_keeps_even_towers():
    full = [c.desc for c in bss_floor_survivors(0, (-5, 9))]
    assert ("utow", 2, 9) in full
    gone = [c.desc for c in bss_floor_survivors(1, (-5, 9))]
    assert ("utow", 2, 9) not in gone


# ---------------------------------------------------------------------------
# slices
# ---------------------------------------------------------------------------

def test_slice_entries():
    assert sss_entry_e1(0, 0) == Z
    assert sss_entry_e1(1, 1) == F2
    assert sss_entry_e1(-2, 0) == FgAbelian.zero()
    assert sss_entry_e1(2, 1) == FgAbelian.zero()  # odd parity
    # along the display diagonal from (2,0) the first class appears two
    # floors up, where it is the square of the formal variable times x
    assert sss_entry_e1(*bss_to_sss(2, 0)) == FgAbelian.zero()
    assert sss_entry_e1(*bss_to_sss(3, 1)) == FgAbelian.zero()
    assert sss_entry_e1(*bss_to_sss(4, 2)) == Z
    assert sss_entry_einf(4, 0) == Z
    assert sss_entry_einf(3, 3) == FgAbelian.zero()  # eta^3 dies


def test_slice_transform_round_trip():
    for xb in range(-9, 10):
        for yb in range(-9, 10):
            assert sss_to_bss(*bss_to_sss(xb, yb)) == (xb, yb)
    with pytest.raises(TheoryError):
        sss_to_bss(1, 0)


def test_slice_totals_reproduce_ko():
    ko = ["Z", "Z/2", "Z/2", "0", "Z", "0", "0", "0", "Z"]
    for n in range(9):
        total = FgAbelian.zero()
        for s in range(0, 40):
            total = total.direct_sum(sss_entry_einf(n, s))
        assert str(total) == ko[n], n


# ---------------------------------------------------------------------------
# checkers
# ---------------------------------------------------------------------------

def test_gap_and_connectivity_pass_on_closed_forms():
    w = Window.square(12)
    for chart in (closed_form_hz(w), closed_form_kr(w)):
        assert gap_check(chart).passed
        assert connectivity_check(chart).passed


def test_mutation_is_caught_with_its_degree():
    w = Window.square(6)
    mutated = inject_class(closed_form_hz(w), (-1, 1))
    rep = gap_check(mutated)
    assert not rep.passed
    assert rep.violations[0][0] == (-1, 1)


def test_tate_chart_fails_connectivity():
    data = run_tate_pipeline(hz_seed(), Window.square(4), padding=2)
    rep = connectivity_check(data.tate)
    assert not rep.passed
