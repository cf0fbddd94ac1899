"""Cell-by-cell checkers over computed charts."""
from __future__ import annotations

import math
from fractions import Fraction

from ..resolve.chart import ExtChart, ExtClass, gf2_rank
from ..resolve.engine import TruncationError
from ..towers import GradedModule, TowerChart, Uncomputed
from ..trigrade import Plane, TriDegree
from .report import Report


# ------------------------------------------------------------- chart views

class _View:
    """Uniform cell access: positions(), bounds(s, f), dim(d) (None when not
    trustworthy), op(name, d)."""


class _ExtView(_View):
    def __init__(self, chart: ExtChart):
        self.c = chart

    def positions(self):
        for f in range(self.c.f_max):
            for t in range(f, self.c.t_max + 1):
                yield t - f, f

    def bounds(self, s, f):
        if not self.c.in_window(TriDegree(s, f, 0)) or s < 0:
            return None
        return self.c.weight_range(s, f)

    def dim(self, d):
        return self.c.dim(d)

    def op(self, name, d):
        op = "tau" if name == "tau" else int(str(name).lstrip("h"))
        if not self.c.in_window(self.c.operator_target(op, d)):
            raise Uncomputed(str(d))
        return self.c.operator_matrix(op, d)

    def window(self):
        return f"t<={self.c.t_max}, f<{self.c.f_max}"


class _TowerView(_View):
    def __init__(self, tc: TowerChart):
        self.c = tc

    def positions(self):
        s_lo, s_hi, f_lo, f_hi = self.c.window
        for s in range(s_lo, s_hi + 1):
            for f in range(f_lo, f_hi + 1):
                yield s, f

    def bounds(self, s, f):
        if not self.c.in_window(s, f):
            return None
        col = self.c.column(s, f)
        if not col or "floor" not in col:
            return None
        ws = [w for w in col if w != "floor"]
        return col["floor"] + 1, max(ws + [col["floor"] + 1])

    def dim(self, d):
        if not self.c.in_window(d.s, d.f):
            return None
        try:
            return self.c.sum.dim(d)
        except Uncomputed:
            return None

    def op(self, name, d):
        return self.c.model.op(name, d)

    def window(self):
        return "s in [{}, {}], f in [{}, {}]".format(*self.c.window)


class _ModuleView(_View):
    def __init__(self, m: GradedModule, window):
        self.c = m
        self.win = window

    def positions(self):
        s_lo, s_hi, f_lo, f_hi = self.win
        for s in range(s_lo, s_hi + 1):
            for f in range(f_lo, f_hi + 1):
                yield s, f

    def bounds(self, s, f):
        try:
            return self.c.bounds(s, f)
        except Uncomputed:
            return None

    def dim(self, d):
        s_lo, s_hi, f_lo, f_hi = self.win
        if not (s_lo <= d.s <= s_hi and f_lo <= d.f <= f_hi):
            return None
        try:
            return self.c.dim(d)
        except Uncomputed:
            return None

    def op(self, name, d):
        return self.c.op(name, d)

    def window(self):
        return "s in [{}, {}], f in [{}, {}]".format(*self.win)


class _SparseView(_View):
    """{(s, f, w): dim} listing every nonzero cell explicitly."""

    def __init__(self, cells: dict):
        self.cells = {TriDegree(*k): v for k, v in cells.items() if v}

    def positions(self):
        return sorted({(d.s, d.f) for d in self.cells})

    def bounds(self, s, f):
        ws = [d.w for d in self.cells if (d.s, d.f) == (s, f)]
        # one below the lowest listed weight is zero: report lo = min(ws)
        return (min(ws), max(ws)) if ws else None

    def dim(self, d):
        return self.cells.get(d, 0)

    def op(self, name, d):
        raise Uncomputed("sparse charts carry no operators")

    def window(self):
        return "explicit cells"

    sparse = True


class _H0TorsionView(_ExtView):
    """The h0-torsion part of an Ext chart: dim minus the rank of the longest
    h0 power that stays in the window.  Unknown (None) when no power fits."""

    def dim(self, d):
        n = self.c.dim(d)
        if not n:
            return n
        cols = [1 << i for i in range(n)]
        cur = d
        steps = 0
        while True:
            nxt = self.c.operator_target(0, cur)
            if not self.c.in_window(nxt):
                break
            cols = [self.c.multiply_h(0, ExtClass(cur, c)).vector if c else 0 for c in cols]
            cur = nxt
            steps += 1
            if not any(cols):
                break
        if steps == 0:
            return None
        return n - gf2_rank(cols)

    def window(self):
        return super().window() + ", h0-torsion part"


def h0_torsion_view(chart: ExtChart) -> _View:
    return _H0TorsionView(chart)


def view_of(chart, window=None) -> _View:
    if isinstance(chart, _View):
        return chart
    if isinstance(chart, ExtChart):
        return _ExtView(chart)
    if isinstance(chart, TowerChart):
        return _TowerView(chart)
    if isinstance(chart, GradedModule):
        if window is None:
            raise ValueError("a bare module needs an explicit window")
        return _ModuleView(chart, window)
    if isinstance(chart, dict):
        return _SparseView(chart)
    raise TypeError(f"cannot read cells of {type(chart).__name__}")


def _weights(v: _View, s, f):
    """Weights to inspect at (s, f): every event plus one stable weight below
    (the sparse view lists cells exactly, so nothing below)."""
    b = v.bounds(s, f)
    if b is None:
        return None, []
    lo, hi = b
    floor = lo if getattr(v, "sparse", False) else lo - 1
    return floor, list(range(hi, floor - 1, -1))


# ------------------------------------------------------------- vanishing

def check_vanishing(chart, plane: Plane, require_s_positive: bool = True, window=None,
                    name="vanishing") -> Report:
    """Every computed nonzero cell strictly above the plane is a violation."""
    v = view_of(chart, window)
    rep = Report(name, f"{v.window()}; {plane}" + ("; s>0" if require_s_positive else ""))
    for s, f in v.positions():
        if require_s_positive and s <= 0:
            continue
        floor, ws = _weights(v, s, f)
        for w in ws:
            d = TriDegree(s, f, w)
            n = v.dim(d)
            if n is None:
                rep.skip(d, "not computed")
                continue
            rep.checked += 1
            if n and plane.contains(d):
                rep.add(d, 0, n)
        if not ws or getattr(v, "sparse", False):
            continue
        # below the floor the cell is constant; with b > 0 the plane dips
        # below any fixed f as w decreases
        d = TriDegree(s, f, floor)
        n = v.dim(d)
        if n and plane.b > 0 and not plane.contains(d):
            x = (Fraction(f) - plane.a * s - plane.c) / plane.b
            w = min(floor - 1, math.ceil(x) - 1)
            rep.add(TriDegree(s, f, w), 0, n)
    return rep


# ------------------------------------------------------------- operator iso

def check_operator_iso(source, target, op, plane: Plane, require_s_positive: bool = True,
                       window=None, name="operator-iso", t_max=None) -> Report:
    """op is an operator name (acting on source, landing in target) or a pair
    (degree, fn) with fn(d) the matrix from source cell d to target cell
    d + degree.  Violations are cells strictly above the plane where the
    operator is not bijective; cells whose image is not computed, or whose
    image has internal degree beyond t_max, are skipped."""
    sv = view_of(source, window)
    tv = sv if target is None or target is source else view_of(target, window)
    if isinstance(op, str):
        if isinstance(source, ExtChart):
            i = "tau" if op == "tau" else int(op.lstrip("h"))
            deg = source.operator_target(i, TriDegree(0, 0, 0))
        else:
            deg = (source.model if isinstance(source, TowerChart) else source).op_degree(op)
        opname = op

        def matrix(d):
            return sv.op(opname, d)
    else:
        deg, matrix = op
        opname = "map"
    rep = Report(name, f"{sv.window()}; {opname} above {plane}")
    pos = set(sv.positions())
    pos |= {(s - deg.s, f - deg.f) for s, f in tv.positions()}
    for s, f in sorted(pos):
        if require_s_positive and s <= 0:
            continue
        if not plane.contains(TriDegree(s, f, 0)) and plane.b == 0:
            continue
        fl1, w1 = _weights(sv, s, f)
        fl2, w2 = _weights(tv, s + deg.s, f + deg.f)
        ws = set(w1) | {w - deg.w for w in w2}
        for w in sorted(ws, reverse=True):
            d = TriDegree(s, f, w)
            if not plane.contains(d):
                continue
            d2 = d + deg
            if t_max is not None and d2.s + d2.f > t_max:
                rep.skip(d, f"image beyond t={t_max}")
                continue
            n1, n2 = sv.dim(d), tv.dim(d2)
            if n1 is None or n2 is None:
                rep.skip(d, "source or image cell not computed")
                continue
            if n1 == 0 and n2 == 0:
                continue
            try:
                m = matrix(d) if n1 else []
            except (Uncomputed, TruncationError, ValueError):
                rep.skip(d, "operator not computable")
                continue
            rep.checked += 1
            r = gf2_rank(m)
            if not (r == n1 == n2):
                rep.add(d, f"iso {n1}->{n2}", f"rank {r}")
    return rep


# ------------------------------------------------------------- main theorem

def _bits(v):
    while v:
        lb = v & -v
        yield lb.bit_length() - 1
        v ^= lb


def torsion_subspace(chart: ExtChart, d: TriDegree, cert_plane=None):
    """(basis of certified h1-torsion at d, complete) where complete means every
    other class of the cell is certified to generate an h1-tower."""
    from ..towers import kernel
    cert_plane = cert_plane or Plane(Fraction(1, 2), 0, Fraction(3, 2))
    n = chart.dim(d) or 0
    if n == 0:
        return [], True
    cols = [1 << i for i in range(n)]   # images of the basis, in the current cell
    cur = d
    while True:
        ker = kernel(cols)
        tors = [sum(1 << i for i in _bits(c)) for c in ker]
        if len(tors) == n:
            return tors, True
        if cur.s > 0 and cert_plane.contains(cur) and any(cols):
            # nonzero classes above the plane generate h1-towers
            return tors, True
        nxt = cur + TriDegree(1, 1, 1)
        if not chart.in_window(nxt):
            return tors, False
        cols = [chart.multiply_h(1, chart.element(cur, 0).__class__(cur, c)).vector if c else 0
                for c in cols]
        cur = nxt


def required_window(r: int):
    """Smallest (t_max, f_max) holding a cell above the uniqueness plane with
    s > 0 together with its P_r translate."""
    e = 2 ** r
    best = None
    for f in range(0, 64):
        for s in range(1, 64):
            if Fraction(f) > Fraction(s, 2) + 3 - e:
                t = s + f + 3 * e
                cand = (t, f + e + 1)
                if best is None or cand < best:
                    best = cand
                break
    return best


class WindowTooSmall(ValueError):
    pass


def main_theorem_check(r: int, t_max: int, f_max: int, algebra="A", chart: ExtChart | None = None,
                       s_max: int | None = None) -> Report:
    """Finite-window check of the periodicity theorem for P_r = <h_{r+1}, h0^(2^r), ->.

    (i)   uniqueness: the indeterminacy h_{r+1} Ext + Ext x vanishes for x with
          s > 0 and f > s/2 + 3 - 2^r;
    (ii)  P_r maps the certified h1-torsion above f = s/5 + 12/5 bijectively
          onto the certified h1-torsion of the translate;
    (iii) cells with tower or unknown h1 status are listed, not asserted."""
    from ..hopf import PRESENTATIONS, sphere
    from ..resolve.engine import Resolution
    from ..resolve.products import h_class, periodicity_apply, yoneda_product

    if r < 2:
        raise ValueError("the periodicity operator is defined for r >= 2")
    e = 2 ** r
    need_t, need_f = required_window(r)
    if t_max < need_t or f_max < need_f:
        raise WindowTooSmall(f"window t<={t_max}, f<{f_max} holds no checkable cell for r={r}; "
                             f"need t_max >= {need_t} and f_max >= {need_f}")
    if chart is None:
        chart = ExtChart(Resolution(PRESENTATIONS[algebra], sphere(), t_max, f_max))
    P = TriDegree(2 * e, e, e)
    uplane = Plane(Fraction(1, 2), 0, Fraction(3 - e))
    tplane = Plane(Fraction(1, 5), 0, Fraction(12, 5))
    top = Report(f"main-theorem r={r}", f"t<={chart.t_max}, f<{chart.f_max}")
    uniq = Report("uniqueness", f"s>0, {uplane}")
    iso = Report("torsion-iso", f"s>0, {tplane}" + (f", s<={s_max}" if s_max is not None else ""))
    tow = Report("tower-exclusion", "cells outside the certified torsion")
    top.subreports = [uniq, iso, tow]

    hr = h_class(chart, r + 1)
    hr_deg = hr.degree
    left_deg = hr_deg + TriDegree(0, e, 0) + TriDegree(1, -1, 0)   # = P
    left_dim = chart.dim(left_deg) or 0
    left_classes = [chart.element(left_deg, i) for i in range(left_dim)]
    if left_dim:
        top.notes.append(f"Ext at {left_deg} has dimension {left_dim}")

    evaluated = []

    def h_times(y):
        if r + 1 in chart.op_indices:
            return chart.multiply_h(r + 1, y)
        return yoneda_product(chart, hr, y)

    for s, f in _ExtView(chart).positions():
        if s <= 0:
            continue
        if s_max is not None and s > s_max:
            continue
        rng = chart.weight_range(s, f)
        if rng is None:
            continue
        lo, hi = rng
        tgt_pos = TriDegree(s, f, 0) + P
        in_u = uplane.contains(TriDegree(s, f, 0))
        in_t = tplane.contains(TriDegree(s, f, 0))
        if not (in_u or in_t):
            continue
        if not chart.in_window(tgt_pos):
            for w in range(hi, lo - 1, -1):
                if chart.dim(TriDegree(s, f, w)):
                    (uniq if in_u else iso).skip(TriDegree(s, f, w), "translate outside the window")
            continue
        trng = chart.weight_range(tgt_pos.s, tgt_pos.f)
        w_lo = min(lo, trng[0] - e) if trng else lo
        w_hi = max(hi, trng[1] - e) if trng else hi
        for w in range(w_hi, w_lo - 2, -1):
            d = TriDegree(s, f, w)
            n = chart.dim(d)
            d2 = d + P
            if in_u and n:
                # (i) indeterminacy
                y_deg = d + TriDegree(0, e, 0) + TriDegree(1, -1, 0)
                uniq.checked += 1
                bad = []
                if chart.in_window(y_deg) and chart.in_window(y_deg + hr_deg):
                    for i in range(chart.dim(y_deg) or 0):
                        z = h_times(chart.element(y_deg, i))
                        if not z.is_zero():
                            bad.append(("h", i))
                else:
                    uniq.skip(d, "indeterminacy source outside the window")
                for j in range(n):
                    x = chart.element(d, j)
                    for yl in left_classes:
                        try:
                            if not yoneda_product(chart, yl, x).is_zero():
                                bad.append(("x", j))
                        except (TruncationError, ValueError):
                            uniq.skip(d, "right indeterminacy not computable")
                if bad:
                    uniq.add(d, "zero indeterminacy", bad)
            if not in_t:
                continue
            # (ii) torsion isomorphism
            if not n and not chart.dim(d2):
                continue
            t_src, c_src = torsion_subspace(chart, d)
            t_tgt, c_tgt = torsion_subspace(chart, d2)
            if n and len(t_src) < n:
                tow.skip(d, f"{n - len(t_src)} of {n} dims " + ("tower" if c_src else "unknown"))
            if not c_src or not c_tgt:
                iso.skip(d, "h1 status of source or target not certified")
                continue
            images = []
            ok = True
            for x_vec in t_src:
                x = type(chart.element(d, 0))(d, x_vec)
                try:
                    res = periodicity_apply(chart, r, x)
                except (TruncationError, ValueError, ArithmeticError) as exc:
                    iso.skip(d, f"P_{r} not computable: {exc}")
                    ok = False
                    break
                if res.indeterminacy:
                    iso.skip(d, "P_r has indeterminacy here")
                    ok = False
                    break
                images.append(res.representative.vector)
                evaluated.append((d, d2))
            if not ok:
                continue
            iso.checked += 1
            rk = gf2_rank(images)
            inside = gf2_rank(list(t_tgt) + images) == len(t_tgt)
            if not (rk == len(t_src) == len(t_tgt) and inside):
                iso.add(d, f"bijection {len(t_src)}->{len(t_tgt)}",
                        f"rank {rk}, image in torsion: {inside}")
    iso.notes.append(f"{len(evaluated)} P_{r} evaluations on certified torsion classes")
    return top
