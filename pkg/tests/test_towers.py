import pytest
from hypothesis import given, settings, strategies as st

from motext.resolve import ExtClass
from motext.towers import (ExtModule, TowerChart, Uncomputed, ZeroModule, f0_groups, f01_groups,
                           h1_torsion_certify, ladder_stage_dims, mod_h1_infty, smash_h0k_groups,
                           suspend, theta_cofiber_groups)
from motext.trigrade import C0, TriDegree

WIN = (-3, 12, -2, 9)


def _cells(tc):
    s_lo, s_hi, f_lo, f_hi = tc.window
    for s in range(s_lo, s_hi + 1):
        for f in range(f_lo, f_hi + 1):
            for w in range(-4, 14):
                yield TriDegree(s, f, w)


def test_zero_input_gives_zero_output():
    F0 = f0_groups(ZeroModule(), window=(0, 6, 0, 6))
    assert F0.nonzero_positions() == set() and F0.markers == []
    Y = smash_h0k_groups(F0, 2)
    assert Y.nonzero_positions() == set()


def _with_extra_ops(chart):
    zero = TriDegree(0, 0, 0)
    return ExtModule(chart, extra={
        "id": (zero, lambda x: x),
        "zero": (zero, lambda x: ExtClass(x.degree, 0)),
    })


def test_identity_cofiber_is_zero(a1_chart):
    tc = theta_cofiber_groups(_with_extra_ops(a1_chart), "id", window=WIN)
    assert tc.nonzero_positions() == set()


def test_zero_map_cofiber_is_sum_with_shift(a1_chart):
    M = _with_extra_ops(a1_chart)
    tc = theta_cofiber_groups(M, "zero", window=(0, 8, 0, 6))
    for d in _cells(tc):
        if d.s < 0 or d.f < 0:
            continue
        assert tc.dim(d) == M.dim(d) + M.dim(d + TriDegree(1, -1, 0))


def test_smash_needs_positive_power(a1_chart):
    with pytest.raises(ValueError):
        smash_h0k_groups(f0_groups(a1_chart, window=WIN), 0)


def test_f0_removes_h0_towers_and_adds_negative_tower(a1_chart):
    F0 = f0_groups(a1_chart, window=WIN)
    # the h0 tower on 1 is gone from the 0-stem and reappears as a negative tower at s = -1
    assert F0.dim(TriDegree(0, 3, 0)) == 0
    assert {(m.base.s, m.base.f, m.direction) for m in F0.markers} >= {(-1, 0, "h0")}
    # h1 and its multiples are h0-torsion and survive
    assert F0.dim(TriDegree(1, 1, 1)) == 1
    assert F0.dim(TriDegree(2, 2, 2)) == 1


def test_f0_agrees_with_ext_on_torsion(a1_chart):
    F0 = f0_groups(a1_chart, window=WIN)
    # (8,3,5): the h0-torsion class c0 over A(1) is absent, but h1 P at (9,5,5) is present
    assert F0.dim(TriDegree(9, 5, 5)) == a1_chart.dim(TriDegree(9, 5, 5)) == 1


def test_f01_has_no_classes_above_adams_line(a1_chart):
    F01 = f01_groups(f0_groups(a1_chart, window=WIN))
    for d in _cells(F01):
        if d.s > 0 and 2 * d.f > d.s + 3 and d.s + d.f <= 14:
            assert not F01.dim(d), d


def test_suspend_shifts_cells(a1_chart):
    F0 = f0_groups(a1_chart, window=WIN)
    shift = TriDegree(-1, 1, 0)
    S = suspend(F0, shift)
    for d in [TriDegree(1, 1, 1), TriDegree(3, 3, 3), TriDegree(8, 4, 4)]:
        assert S.dim(d + shift) == F0.dim(d)


def test_h1_colimit_outlasts_periodic_transients():
    # stage maps need not be injective, and at (5,-2,-3) the cokernel ladder
    # is 1,0,0,0 repeating until h1^k carries the target above the negative
    # h0 towers; the colimit is the eventual value 0
    from motext.verify.figures import charts_over_A1
    *_, F0 = charts_over_A1()
    Z = mod_h1_infty(F0)
    d = TriDegree(5, -2, -3)
    coker = dict(Z.parts)["coker"]
    stages = [coker.stage_dim(d, k) for k in range(1, 25)]
    assert stages[:13] == [1, 0, 0, 0] * 3 + [1]
    assert stages[13:] == [0] * 11
    assert d not in set(Z.unstable()) and Z.dim(d) == 0


def test_certify_torsion_and_towers(a_chart):
    h0 = a_chart.unique_class(TriDegree(0, 1, 0))
    h1 = a_chart.unique_class(TriDegree(1, 1, 1))
    c0 = a_chart.unique_class(C0)
    assert h1_torsion_certify(a_chart, h0) == "torsion"
    assert h1_torsion_certify(a_chart, h1) == "tower"
    assert h1_torsion_certify(a_chart, c0) == "tower"


def test_certify_reports_unknown_at_window_edge():
    from motext.hopf import A1, sphere
    from motext.resolve import ExtChart, Resolution
    small = ExtChart(Resolution(A1, sphere(), 6, 6))
    # h1^3 at (3,3,3) lies on the line; h1^4 is outside t <= 6
    h1 = small.unique_class(TriDegree(1, 1, 1))
    assert h1_torsion_certify(small, h1) == "unknown"


def test_tsv_rows_cover_nonzero_cells(a1_chart):
    F0 = f0_groups(a1_chart, window=WIN)
    rows = list(F0.tsv_rows())
    assert {(r[0], r[1]) for r in rows} == F0.nonzero_positions()
