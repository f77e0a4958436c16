"""The page engine: monomial bases, Leibniz differentials, page turns."""

import pytest
from hypothesis import given, settings, strategies as st

from roqcharts.exactalg import FgAbelian
from roqcharts.grading import Window, hz_summands, kr_summands
from roqcharts.specseq import (CollapseError, DifferentialError,
                               DifferentialRule, PageGenerator, Presentation,
                               PresentationError, collapse_to_chart,
                               find_candidates, page_from_presentation,
                               rule_shift, set_differential, turn_page)
from roqcharts.theories import build_pages, hz_seed, kr_seed


Z = FgAbelian.free(1)
F2 = FgAbelian.cyclic(2)


def hz_pres():
    return Presentation((PageGenerator("a", (-1, 1, -1)),
                         PageGenerator("lam", (0, 1, -1), invertible=True)))


D1 = DifferentialRule(label=1, source=(("lam", 1),), coeff=2, target=(("a", 1),))


# ---------------------------------------------------------------------------
# presentations and monomial bases
# ---------------------------------------------------------------------------

def test_presentation_rejects_two_invertibles():
    with pytest.raises(PresentationError):
        Presentation((PageGenerator("x", (0, 1, -1), True),
                      PageGenerator("y", (0, 2, -2), True)))


def test_presentation_rejects_nonfinite_generator():
    with pytest.raises(PresentationError):
        Presentation((PageGenerator("x", (1, 1, 1)),))
    with pytest.raises(PresentationError):
        Presentation((PageGenerator("x", (0, 1, -1)),))  # s=0, t+b=0 not invertible


def test_monomial_basis_free_on_a_and_lambda():
    p = page_from_presentation(hz_pres())
    assert p.monomials_at((-2, 3, -3)) == ((2, 1),)       # a^2 lam
    assert p.monomials_at((0, -3, 3)) == ((0, -3),)       # lam^-3
    assert p.monomials_at((0, 0, 0)) == ((0, 0),)
    assert p.monomials_at((1, 0, 0)) == ()
    assert p.monomials_at((-1, 2, 0)) == ()


def test_empty_alphabet_unit_only():
    p = page_from_presentation(Presentation(()))
    assert p.monomials_at((0, 0, 0)) == ((),)
    assert p.monomials_at((0, 1, -1)) == ()


def test_kr_monomials():
    pres = Presentation((PageGenerator("a", (-1, 1, -1)),
                         PageGenerator("vb", (0, 1, 1)),
                         PageGenerator("lam", (0, 1, -1), invertible=True)))
    p = page_from_presentation(pres)
    assert p.monomials_at((-3, 4, -2)) == ((3, 1, 0),)    # a^3 vb
    assert p.monomials_at((0, 2, -2)) == ((0, 0, 2),)     # lam^2


# ---------------------------------------------------------------------------
# differentials
# ---------------------------------------------------------------------------

def test_rule_shift_validation():
    r, shift = rule_shift(hz_pres(), D1)
    assert (r, shift) == (1, (-1, 0, 0))
    bad = DifferentialRule(label=1, source=(("lam", 1),), coeff=1,
                           target=(("a", 2),))
    with pytest.raises(DifferentialError):
        rule_shift(hz_pres(), bad)


def test_kr_second_round_has_honest_shape_three():
    seed = kr_seed()
    r, shift = rule_shift(seed.presentation, seed.rules[1])
    assert (r, shift) == (3, (-3, 2, 0))


def test_d1_alternates_on_lambda_powers():
    page = turn_page(set_differential(page_from_presentation(hz_pres()), D1))
    # odd powers die, even powers survive as cycles
    for j in range(-6, 7):
        tri = (0, j, -j)
        g = page.group_at(tri)
        assert g == (Z if j % 2 == 0 else FgAbelian.zero()), j
    assert page.is_cycle({"lam": 2})       # the square is a cycle
    assert not page.is_cycle({"lam": 1})


def test_pending_differential_matrix():
    p = set_differential(page_from_presentation(hz_pres()), D1)
    mat = p.differential_matrix((0, 1, -1))
    assert mat.entries == ((2,),)
    mat0 = p.differential_matrix((0, 2, -2))
    assert mat0.is_zero()


def test_degree_mismatched_assignment_rejected():
    with pytest.raises(DifferentialError):
        set_differential(page_from_presentation(hz_pres()),
                         DifferentialRule(1, (("lam", 1),), 1, (("lam", 2),)))


def test_square_nonzero_rejected_with_witness():
    # d(lam) = a^3 vb lam^-1 has the legal r = 3 shape but fails d o d = 0
    pres = Presentation((PageGenerator("a", (-1, 1, -1)),
                         PageGenerator("vb", (0, 1, 1)),
                         PageGenerator("lam", (0, 1, -1), invertible=True)))
    rule = DifferentialRule(label=1, source=(("lam", 1),), coeff=1,
                            target=(("a", 3), ("vb", 1), ("lam", -1)))
    assert rule_shift(pres, rule)[0] == 3
    page = page_from_presentation(pres)
    with pytest.raises(DifferentialError) as err:
        set_differential(page, rule, check_window=Window.square(2))
    assert "d o d" in str(err.value)


def test_zero_assignment_is_identity_turn():
    rule = DifferentialRule(label=1, source=(("lam", 1),), coeff=0,
                            target=(("a", 1),))
    before = page_from_presentation(hz_pres())
    after = turn_page(set_differential(before, rule))
    for tri in [(0, 1, -1), (-2, 3, -1), (0, -4, 4), (-1, 1, -1)]:
        assert after.group_at(tri) == before.group_at(tri)


def test_turn_requires_pending():
    with pytest.raises(DifferentialError):
        turn_page(page_from_presentation(hz_pres()))


# ---------------------------------------------------------------------------
# the two theories degreewise
# ---------------------------------------------------------------------------

def expected_hz_e2(x, y):
    descs = hz_summands(x, y, variant="hfp")
    return FgAbelian.from_orders([0 if k[0] == "usq" else 2 for k in descs])


def expected_kr_e3(x, y):
    descs = kr_summands(x, y, variant="hfp")
    return FgAbelian.from_orders(
        [0 if k[0] in ("Usq", "Uray_2u") else 2 for k in descs])


def test_hz_e2_degreewise():
    page = build_pages(hz_seed())[-1]
    w = Window.square(10)
    chart = collapse_to_chart(page, w, "e2")
    for d in w.degrees():
        assert chart.group(d) == expected_hz_e2(*d), d


def test_kr_e3_degreewise():
    page = build_pages(kr_seed())[-1]
    w = Window.square(10)
    chart = collapse_to_chart(page, w, "e3")
    for d in w.degrees():
        assert chart.group(d) == expected_kr_e3(*d), d


def test_no_remaining_candidates():
    w = Window.square(10)
    assert find_candidates(build_pages(hz_seed())[-1], w) == []
    assert find_candidates(build_pages(kr_seed())[-1], w) == []


def test_collapse_refuses_live_differential():
    # the first page of the integral theory still supports d1
    page = build_pages(hz_seed())[0]
    with pytest.raises(CollapseError) as err:
        collapse_to_chart(page, Window.square(3), "raw")
    assert "d_1" in str(err.value)


def test_single_filtration_on_window():
    # every chart degree of both final pages sits in one filtration;
    # collapse_to_chart would raise otherwise, so reaching here suffices
    for seed in (hz_seed(), kr_seed()):
        collapse_to_chart(build_pages(seed)[-1], Window.square(6), "ok")


# ---------------------------------------------------------------------------
# the Leibniz rule on products
# ---------------------------------------------------------------------------

mono_exp = st.integers(min_value=0, max_value=5)
lam_exp = st.integers(min_value=-5, max_value=5)


@given(mono_exp, lam_exp, mono_exp, lam_exp)
@settings(max_examples=120, deadline=None)
def test_leibniz_mod_two_on_products(a1, l1, a2, l2):
    """d(mn) = d(m) n + (-1)^{deg m} m d(n) with the Koszul sign on total
    degree; coefficients are compared mod 2, which is exactly what the
    two-torsion targets of these theories can see."""
    page = set_differential(page_from_presentation(hz_pres()), D1)
    rule = page.pending

    def d(mono):
        img = page._apply_rule(rule, mono)
        return {} if img is None else {img[1]: img[0]}

    def mul(mono, other):
        return tuple(x + y for x, y in zip(mono, other))

    m, n = (a1, l1), (a2, l2)
    lhs = d(mul(m, n))
    sign = -1 if (sum(m) % 2) else 1  # total degree of a^i lam^j is i + j...
    rhs: dict = {}
    for mono, c in d(m).items():
        rhs[mul(mono, n)] = rhs.get(mul(mono, n), 0) + c
    for mono, c in d(n).items():
        rhs[mul(m, mono)] = rhs.get(mul(m, mono), 0) + sign * c
    keys = set(lhs) | set(rhs)
    for k in keys:
        assert (lhs.get(k, 0) - rhs.get(k, 0)) % 2 == 0
