import json
import math
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from conftest import borromean, grids, slopes
from rhsinv.errors import DegenerateSurgeryError, IncompleteGridError, ValidationError
from rhsinv.jones import JonesGrid, MilnorData, SlopeClass, load_fixture, unknot_grid, unlink_grid
from rhsinv.numtheory import dedekind_sum
from rhsinv.series import KSeries, sphere_series
from rhsinv.surgery import (
    RHSInvariants,
    SurgeryPresentation,
    connected_sum,
    delta_coefficients,
    denominator_bound_check,
    framing_correction,
    hoste_lambda_cw,
    hoste_s1,
    integerize,
    lens_space_invariants,
    perturbative_invariants,
    presentation_from_json,
)


def knot(p, q, grid=None, framing=0, order=6):
    return SurgeryPresentation([(p, q)], framings=[framing], cls="BL", jones=grid or unknot_grid(order))


# -- framing correction ------------------------------------------------------

@pytest.mark.parametrize("q", [1, 2, -3, 7])
def test_framing_p1(q):
    assert framing_correction(knot(1, q)) == Fraction(q, 2)


def test_framing_examples():
    assert framing_correction(knot(2, 1)) == Fraction(1, 4)
    assert framing_correction(knot(3, 1)) == Fraction(-1, 6)


# -- delta coefficients -------------------------------------------------------

@given(slopes())
def test_unknot_delta1(pq):
    p, q = pq
    assert delta_coefficients(knot(p, q, order=2), 1)[1] == Fraction(-q, 2 * p)


def test_trivial_grid_gives_zero_delta():
    sp = SurgeryPresentation([(2, 3)], cls="BL", jones=JonesGrid(1, "BL", 4, {(0, 0, (0,)): 1}))
    assert delta_coefficients(sp, 4) == [1, 0, 0, 0, 0]


@pytest.mark.parametrize("qs", [(1, 1, 1), (2, -1, 3)])
def test_borromean_delta1(qs):
    sp = SurgeryPresentation([(1, q) for q in qs], milnor=borromean())
    # single-component terms: -q_j/2 each; triple term 12 q1 q2 q3
    assert delta_coefficients(sp, 1)[1] == 12 * math.prod(qs) - Fraction(sum(qs), 2)


def test_borromean_delta1_rational():
    coeffs = [(3, 2), (-5, 1), (2, 7)]
    sp = SurgeryPresentation(coeffs, milnor=borromean())
    x = [Fraction(q, p) for p, q in coeffs]
    assert delta_coefficients(sp, 1)[1] == 12 * math.prod(x) - sum(x) / 2


def test_incomplete_grid_names_cells():
    sp = SurgeryPresentation([(1, 1)] * 3, milnor=borromean())
    with pytest.raises(IncompleteGridError) as err:
        delta_coefficients(sp, 2)
    assert (6, -4) in err.value.missing and "(6, -4)" in str(err.value)


# -- assembly -------------------------------------------------------------------

def test_unknot_surgery_examples():
    assert perturbative_invariants(knot(3, 1), 1).S[1] == Fraction(-1, 3)
    assert perturbative_invariants(knot(2, 1), 1).S[1] == 0


@pytest.mark.parametrize("q", [1, -1, 2, -5, 9])
def test_integer_surgery_on_unknot_is_sphere(q):
    inv = perturbative_invariants(knot(1, q), 6)
    assert inv.S == sphere_series(6) and inv.ord_h1 == 1


@pytest.mark.parametrize("p,q", [(p, q) for p in range(1, 13) for q in range(1, max(p, 2)) if math.gcd(p, q) == 1])
def test_lens_two_path(p, q):
    assert perturbative_invariants(knot(p, q), 6) == lens_space_invariants(p, q, 6)


@given(slopes(pmax=15, qmax=15), st.integers(-3, 3))
@settings(max_examples=60)
def test_lens_two_path_with_framing(pq, l):
    # surgery (p, q) with framing l is surgery (p + q l, q) with framing 0
    p, q = pq
    if p + q * l == 0:
        return
    a = perturbative_invariants(knot(p, q, framing=l, order=4), 4)
    b = perturbative_invariants(knot(p + q * l, q, order=4), 4)
    assert a == b == lens_space_invariants(p + q * l, q, 4)


def test_lens_values():
    assert lens_space_invariants(1, 1, 6) == RHSInvariants.sphere(6)
    L31 = lens_space_invariants(3, 1, 4)
    assert L31.S[1] == Fraction(-1, 3) and L31.S[2] == Fraction(1, 54) and L31.S[3] == 0
    assert L31.S[4] == Fraction(-1, 180 * 81) and L31.ord_h1 == 3
    L21 = lens_space_invariants(2, 1, 2)
    assert L21.S[1] == 0 and L21.S[2] == Fraction(1, 24)
    for p, q in [(5, 2), (7, 3), (12, 5)]:
        assert lens_space_invariants(p, q, 2).S[2] == Fraction(1, 6 * p * p)
        assert lens_space_invariants(p, q, 1).S[1] == -6 * dedekind_sum(q, p)


def test_lens_not_rhs():
    with pytest.raises(DegenerateSurgeryError):
        lens_space_invariants(0, 1, 2)


def test_lambda_cw():
    inv = lens_space_invariants(3, 1, 2)
    assert inv.lambda_cw == inv.S[1] / 6


def test_connected_sum():
    L2, L3 = lens_space_invariants(2, 1, 2), lens_space_invariants(3, 1, 2)
    cs = connected_sum(L2, L3)
    assert cs.S[1] == Fraction(-1, 3) and cs.ord_h1 == 6
    assert cs.S[2] == Fraction(1, 24) + Fraction(1, 54) - Fraction(1, 6)
    assert connected_sum(L3, RHSInvariants.sphere(2)) == L3


def test_connected_sum_mixed_orders(caplog):
    cs = connected_sum(lens_space_invariants(2, 1, 4), lens_space_invariants(3, 1, 2))
    assert cs.order == 2 and "truncated" in caplog.text


def test_split_unlink_is_connected_sum():
    coeffs = [(2, 1), (5, 2), (-3, 1)]
    sp = SurgeryPresentation(coeffs, cls="BL", jones=unlink_grid(3, 4))
    expected = RHSInvariants.sphere(4)
    for p, q in coeffs:
        expected = connected_sum(expected, lens_space_invariants(p, q, 4))
    assert perturbative_invariants(sp, 4) == expected


def test_base_manifold():
    base = lens_space_invariants(5, 2, 3)
    sp = SurgeryPresentation([(3, 1)], cls="BL", jones=unknot_grid(3), base=base)
    assert perturbative_invariants(sp, 3) == connected_sum(base, lens_space_invariants(3, 1, 3))


def test_knot_formula_is_link_formula_at_n1():
    # the knot path and a 1-component "link" presentation agree literally
    g = load_fixture("trefoil", 4)
    a = perturbative_invariants(SurgeryPresentation([(2, 3)], cls="BL", jones=g), 4)
    b = perturbative_invariants(SurgeryPresentation([(2, 3)], cls="ASL", jones=g), 4)
    assert a == b


def test_trefoil_integer_surgery():
    g = load_fixture("trefoil", 4)
    for q in (1, -1, 2, -3):
        sp = SurgeryPresentation([(1, q)], cls="BL", jones=g)
        inv = perturbative_invariants(sp, 1)
        assert inv.S[1] == 12 * q == hoste_s1(sp)
        assert inv.lambda_cw == 2 * q


# -- hoste ----------------------------------------------------------------------

@pytest.mark.parametrize("qs", [(1, 1, 1), (-1, 2, 3), (-3, -3, -2)])
def test_hoste_borromean(qs):
    sp = SurgeryPresentation([(1, q) for q in qs], milnor=borromean())
    assert hoste_s1(sp) == 12 * math.prod(qs) == perturbative_invariants(sp, 1).S[1]
    assert hoste_lambda_cw(sp) == 2 * math.prod(qs)


def test_hoste_split_unknot():
    sp = SurgeryPresentation([(1, 5)], milnor=MilnorData(1, phi1_singles={0: 0}))
    assert hoste_s1(sp) == 0


def test_hoste_empty_link():
    base = lens_space_invariants(7, 2, 2)
    assert hoste_s1(SurgeryPresentation([], base=base)) == base.S[1]


def test_hoste_needs_phi1():
    sp = SurgeryPresentation([(1, 1), (1, 1)], cls="BL", jones=unlink_grid(2, 2))
    with pytest.raises(ValidationError):
        hoste_s1(sp)


@st.composite
def asl_data(draw, N):
    idx = range(N)
    triples = {t: draw(st.integers(-2, 2)) for t in
               [(i, j, k) for i in idx for j in idx for k in idx if i < j < k]}
    pairs = {t: draw(st.integers(-2, 2)) for t in [(i, j) for i in idx for j in idx if i < j]}
    singles = {j: draw(st.fractions(-2, 2, max_denominator=6)) for j in idx}
    return MilnorData(N, triples=triples, quartic_pairs=pairs, phi1_singles=singles)


@settings(max_examples=60, deadline=None)
@given(asl_data(4), st.lists(slopes(), min_size=4, max_size=4), st.lists(st.integers(-2, 2), min_size=4, max_size=4))
def test_hoste_path_equality(m, coeffs, framings):
    if any(p + q * l == 0 for (p, q), l in zip(coeffs, framings)):
        return
    sp = SurgeryPresentation(coeffs, framings=framings, milnor=m)
    assert hoste_s1(sp) == perturbative_invariants(sp, 1).S[1]


@settings(max_examples=25, deadline=None)
@given(grids(3, "ASL", 2), st.lists(slopes(), min_size=3, max_size=3))
def test_component_reordering(g, coeffs):
    sp = SurgeryPresentation(coeffs, jones=g)
    ref = perturbative_invariants(sp, 2)
    for perm in permutations(range(3)):
        assert perturbative_invariants(sp.permuted(perm), 2) == ref


def test_s1_is_six_lambda():
    inv = perturbative_invariants(SurgeryPresentation([(2, 1), (1, -1), (1, 2)], milnor=borromean()), 1)
    assert inv.S[1] == 6 * inv.lambda_cw


# -- validation -------------------------------------------------------------------

def test_degenerate_rejected_at_validation():
    with pytest.raises(DegenerateSurgeryError):
        SurgeryPresentation([(2, 1)], framings=[-2], cls="BL", jones=unknot_grid(2))


def test_asl_needs_zero_linking():
    with pytest.raises(ValidationError):
        SurgeryPresentation([(1, 1), (1, 1)], cls="BL", jones=unlink_grid(2, 2), linking=[[0, 1], [1, 0]])


def test_class_consistency():
    with pytest.raises(ValidationError):
        SurgeryPresentation([(1, 1)] * 3, cls="SASL", milnor=borromean())
    with pytest.raises(ValidationError):
        SurgeryPresentation([(1, 1)] * 2, cls="BL",
                            milnor=MilnorData(2, quartic_pairs={(0, 1): 1}, phi1_singles={0: 0, 1: 0}))


def test_slope_violation_rejected():
    bad = JonesGrid(1, "ASL", 2, {(0, 0, (0,)): 1, (1, -1, (1,)): 1})
    with pytest.raises(ValidationError, match="m=1, n=-1"):
        SurgeryPresentation([(1, 1)], jones=bad)


def test_grid_class_checked_against_presentation():
    g = JonesGrid(1, "ASL", 1, {(0, 0, (0,)): 1, (3, -2, (3,)): 1})
    with pytest.raises(ValidationError):
        SurgeryPresentation([(1, 1)], cls="BL", jones=g)


# -- integrality -------------------------------------------------------------------

def test_integerize_examples():
    assert integerize(RHSInvariants.sphere(1), 1).integer == 0
    assert integerize(lens_space_invariants(3, 1, 1), 1).integer == -5806080
    rep = integerize(lens_space_invariants(2, 1, 2), 2)
    assert rep.integral
    assert rep.value == 2 ** 6 * 2 * 24 * math.factorial(18) * 4 * Fraction(1, 24)


def test_integerize_flags_non_integral():
    inv = RHSInvariants(KSeries([0, Fraction(1, 10 ** 30)]), 1)
    rep = integerize(inv, 1)
    assert not rep.integral and rep.integer is None


def test_denominator_bound_examples():
    r = denominator_bound_check(lens_space_invariants(3, 1, 1), 1)
    assert r.ok and r.value == -1
    r = denominator_bound_check(lens_space_invariants(2, 1, 2), 2)
    assert r.ok and r.primes == (2, 3)
    for n in range(1, 7):
        assert denominator_bound_check(RHSInvariants.sphere(6), n).ok
    bad = RHSInvariants(KSeries([0, Fraction(1, 7)]), 1)
    assert not denominator_bound_check(bad, 1).ok


# -- JSON ------------------------------------------------------------------------

BORROMEAN_DOC = {
    "class": "ASL",
    "components": [{"p": 1, "q": 2, "framing": 0}, {"p": 1, "q": -1, "framing": 0}, {"p": 1, "q": 3}],
    "milnor": {"triples": [[0, 1, 2, 1]], "quartic_pairs": []},
    "phi1": {"singles": [0, 0, "0"], "pairs": [], "triples": [[0, 1, 2, 1]]},
    "n_max": 1,
}


def test_presentation_json():
    sp, n = presentation_from_json(json.loads(json.dumps(BORROMEAN_DOC)))
    assert n == 1 and sp.N == 3
    assert perturbative_invariants(sp, 1).S[1] == -72


def test_presentation_json_fixture_reference():
    sp, _ = presentation_from_json({"class": "BL", "components": [{"p": 1, "q": 1}], "jones_fixture": "trefoil"})
    assert perturbative_invariants(sp, 1).S[1] == 12


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d.pop("components"), "components"),
    (lambda d: d["components"][1].update(p="x"), "components[1].p"),
    (lambda d: d["components"][0].update(q=0), "components[0]"),
    (lambda d: d["phi1"].update(singles=[0, 0]), "phi1.singles"),
    (lambda d: d["milnor"].update(triples=[[0, 1, 2]]), "milnor.triples[0]"),
    (lambda d: d["phi1"].update(triples=[[0, 1, 2, 3]]), "phi1 triple"),
])
def test_presentation_json_errors(mutate, where):
    doc = json.loads(json.dumps(BORROMEAN_DOC))
    mutate(doc)
    with pytest.raises((ValidationError, ValueError)) as err:
        presentation_from_json(doc)
    assert where in str(err.value)
