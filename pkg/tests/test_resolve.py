import pytest
from hypothesis import given, settings, strategies as st

from motext.hopf import A, A1, A2_MOD_XI1SQ_XI2, ceta, sphere, zero_comodule
from motext.resolve import (CobarComplex, ExtChart, ExtClass, FastCobar, Resolution,
                            TruncationError, massey_defining_systems, massey_triple,
                            periodicity_apply, yoneda_product)
from motext.hopf import tau_gen, xi_gen
from motext.trigrade import PH1, TriDegree


def compare_with_cobar(p, t_max, f_max):
    chart = ExtChart(Resolution(p, sphere(), t_max, f_max + 1))
    fc = FastCobar(p, t_max)
    bad = []
    n = 0
    for f in range(f_max + 1):
        for t in range(f, t_max + 1):
            span = fc.weight_span(f, t)
            if span is None:
                continue
            for w in range(span[0] - 2, span[1] + 2):
                d = TriDegree(t - f, f, w)
                n += 1
                if fc.dim(d.s, f, w) != chart.dim(d):
                    bad.append((d, fc.dim(d.s, f, w), chart.dim(d)))
    return n, bad


def test_cobar_oracle_a2_quotient():
    n, bad = compare_with_cobar(A2_MOD_XI1SQ_XI2, 20, 8)
    assert n > 100 and bad == []


def test_small_cobar_matches_fast_cobar():
    cx = CobarComplex(A1, None, 10)
    fc = FastCobar(A1, 10)
    for f in range(5):
        for t in range(f, 11):
            for w in range(-2, 8):
                assert cx.dim(TriDegree(t - f, f, w)) == fc.dim(t - f, f, w)


def test_low_degree_classes(a1_chart):
    c = a1_chart
    assert c.dim(TriDegree(0, 1, 0)) == 1        # h0
    assert c.dim(TriDegree(1, 1, 1)) == 1        # h1
    assert c.dim(TriDegree(1, 2, 1)) == 0        # h0 h1 = 0
    assert c.dim(TriDegree(3, 3, 2)) == 0        # tau h1^3 = 0 over A(1)
    assert c.dim(TriDegree(3, 3, 3)) == 1        # h1^3 survives at top weight


def test_h0_h1_product_vanishes(a_chart):
    h0 = a_chart.unique_class(TriDegree(0, 1, 0))
    h1 = a_chart.unique_class(TriDegree(1, 1, 1))
    assert a_chart.multiply_h(0, h1).is_zero()
    assert yoneda_product(a_chart, h0, h1).is_zero()
    assert not a_chart.multiply_h(1, h1).is_zero()


def test_h1_tower_is_tau_torsion(a_chart):
    x = a_chart.unique_class(TriDegree(1, 1, 1))
    for _ in range(3):
        x = a_chart.multiply_h(1, x)
    assert not x.is_zero()
    assert a_chart.multiply_tau(x).is_zero()


def test_massey_h0_h1_h0_is_tau_h1_squared(a_chart):
    h0 = a_chart.unique_class(TriDegree(0, 1, 0))
    h1 = a_chart.unique_class(TriDegree(1, 1, 1))
    res = massey_triple(a_chart, h0, h1, h0)
    h1sq = a_chart.multiply_h(1, h1)
    assert res.representative.degree == TriDegree(2, 2, 1)
    assert res.representative == a_chart.multiply_tau(h1sq)
    assert not res.representative.is_zero()
    assert res.indeterminacy == []


def test_massey_rejects_nonzero_product(a_chart):
    h0 = a_chart.unique_class(TriDegree(0, 1, 0))
    h1 = a_chart.unique_class(TriDegree(1, 1, 1))
    with pytest.raises(ValueError, match="nonzero"):
        massey_triple(a_chart, h1, h1, h0)


def test_periodicity_on_h1(a_chart):
    h1 = a_chart.unique_class(TriDegree(1, 1, 1))
    res = periodicity_apply(a_chart, 2, h1)
    assert res.representative.degree == PH1
    assert not res.representative.is_zero() and res.indeterminacy == []
    assert a_chart.dim(PH1) == 1


def test_periodicity_on_h1_squared(a_chart):
    h1 = a_chart.unique_class(TriDegree(1, 1, 1))
    h1sq = a_chart.multiply_h(1, h1)
    res = periodicity_apply(a_chart, 2, h1sq)
    assert res.representative.degree == TriDegree(10, 6, 6)
    assert not res.representative.is_zero() and res.indeterminacy == []
    # agrees with h1 * P2(h1)
    assert res.representative == a_chart.multiply_h(1, periodicity_apply(a_chart, 2, h1).representative)


def test_periodicity_rejects_h0(a_chart):
    h0 = a_chart.unique_class(TriDegree(0, 1, 0))
    with pytest.raises(ValueError):
        periodicity_apply(a_chart, 2, h0)


def test_periodicity_rejects_small_r(a_chart):
    with pytest.raises(ValueError):
        periodicity_apply(a_chart, 1, a_chart.unique_class(TriDegree(1, 1, 1)))


def test_save_load_roundtrip(tmp_path):
    res = Resolution(A1, sphere(), 14, 6)
    res.save(str(tmp_path / "r"))
    back = Resolution.load(str(tmp_path / "r"))
    assert back.generator_counts() == res.generator_counts()
    c1, c2 = ExtChart(res), ExtChart(back)
    for d in c1.nonzero_cells():
        assert c2.dim(d) == c1.dim(d)


def test_zero_comodule_has_empty_resolution():
    res = Resolution(A1, zero_comodule(), 10, 4)
    assert sum(res.generator_counts().values()) == 0


def test_window_below_top_cell_is_refused():
    with pytest.raises(TruncationError):
        Resolution(A, ceta(), 1, 3)


def test_generator_counts_in_low_degrees():
    counts = Resolution(A1, sphere(), 4, 3).generator_counts()
    # h0 at (0,1,0) and h1 at (1,1,1) are the only f = 1 generators below t = 4
    assert {k: v for k, v in counts.items() if k[1] == 1} == {(0, 1, 0): 1, (1, 1, 1): 1}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 14), st.integers(0, 7), st.integers(-3, 9))
def test_resolution_matches_cobar_pointwise(a1_chart, s, f, w):
    if s + f > 14:
        return
    fc = _fast_a1()
    assert a1_chart.dim(TriDegree(s, f, w)) == fc.dim(s, f, w)


_FAST = {}


def _fast_a1():
    if "a1" not in _FAST:
        _FAST["a1"] = FastCobar(A1, 14)
    return _FAST["a1"]


def test_cobar_brute_force_massey():
    cx = CobarComplex(A, None, 6)
    h0 = (1, 1, 0, cx.cell_cochain(1, 1, [[tau_gen(0)]]))
    h1 = (1, 2, 1, cx.cell_cochain(1, 2, [[xi_gen(1)]]))
    values = massey_defining_systems(cx, h0, h1, h0)
    tau_h1sq = cx.class_vector(2, 4, 1, cx.cell_cochain(2, 4, [[xi_gen(1), xi_gen(1)]]))
    assert tau_h1sq != 0
    assert values == {tau_h1sq}
