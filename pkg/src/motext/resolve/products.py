"""Chain-map lifts, Yoneda products and Massey products on a resolution of
the sphere.

A class x at (t_x, w_x) in filtration f_x lifts to maps x_n: P_{f_x+n} -> P_n
lowering internal degree by t_x; x_n(g) is stored as a bitset over P_n in
degree t_g - t_x (its weight is w_g - w_x).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..taulin import GradedFreeModule, TauMatrix, TauVector, bits_of, solve
from ..trigrade import TriDegree, h_degree
from .chart import ExtChart, ExtClass
from .engine import TruncationError


class ChainMapLift:
    """Lift of a class of Ext(M) (M resolved by chart.res) to a chain map into
    the resolution of the sphere (target, defaulting to chart.res)."""

    def __init__(self, chart: ExtChart, x: ExtClass | None = None, cochain: int | None = None,
                 degree: TriDegree | None = None, target=None):
        self.chart = chart
        self.src = chart.res
        self.res = target or chart.res
        if len(self.res.M.generators) != 1 or self.res.M.generators[0][1] != TriDegree(0, 0, 0):
            raise ValueError("chain-map lifts are implemented into resolutions of the sphere")
        if x is not None:
            degree = x.degree
            cochain = chart.cocycle(x.degree, x.vector)
        self.degree = degree
        self.fx = degree.f
        self.tx = degree.t
        self.wx = degree.w
        self.z = cochain
        self.src_gens = chart.cochain_generators(self.fx, self.tx)
        self._maps = {}

    def value(self, n: int, j: int) -> int:
        """x_n(g_j) for g_j a generator of P_{f_x + n}."""
        key = (n, j)
        v = self._maps.get(key)
        if v is not None:
            return v
        res = self.res
        f = self.fx + n
        if f > self.src.f_max or n > res.f_max:
            raise TruncationError(f"lift needs P_{f}, beyond f_max = {self.src.f_max}")
        g = self.src.gens[f][j]
        t = g.t - self.tx
        if t < 0:
            v = 0
        elif n == 0:
            v = 0
            if t == 0:
                pos = self.src_gens.index(j)
                v = (self.z >> pos) & 1
        else:
            y = self.apply(n - 1, g.t, g.d)
            if y == 0:
                v = 0
            else:
                v = res.lift(n, t, y)
                if v is None:
                    raise ArithmeticError("lift failed: input is not a cocycle")
        self._maps[key] = v
        return v

    def apply(self, n: int, t_src: int, v: int) -> int:
        """x_n on an element of P_{f_x+n} in degree t_src."""
        f = self.fx + n
        out = 0
        t_dst = t_src - self.tx
        if t_dst < 0:
            return 0
        for j, ta, ia in self.src.decode(f, t_src, v):
            img = self.value(n, j)
            if img:
                out ^= self.res.act(ta, ia, n, self.src.gens[f][j].t - self.tx, img)
        return out


def identity_lift(chart: ExtChart) -> ChainMapLift:
    d = TriDegree(0, 0, 0)
    return ChainMapLift(chart, cochain=1, degree=d)


def lift_cocycle_to_chain_map(chart: ExtChart, x: ExtClass) -> ChainMapLift:
    return ChainMapLift(chart, x)


def evaluate_cochain(chart: ExtChart, f: int, t: int, cochain: int, v: int) -> int:
    """Value (0/1) of a cochain on C^f_t at an element of P_f in degree t."""
    if not cochain:
        return 0
    res = chart.res
    st = res.starts(f, t)
    gens = chart.cochain_generators(f, t)
    acc = 0
    for n in bits_of(cochain):
        acc ^= (v >> st[gens[n]]) & 1
    return acc


def compose_cochain(chart: ExtChart, y_deg: TriDegree, y_cochain: int, lift: ChainMapLift,
                    out_chart: ExtChart | None = None) -> int:
    """The cochain y o x_{f_y} on C^{f_x+f_y} in degree t_x + t_y.  y lives on
    chart (the sphere); the result lives on out_chart (default: chart)."""
    out_chart = out_chart or chart
    f = lift.fx + y_deg.f
    t = lift.tx + y_deg.t
    if f >= out_chart.f_max or t > out_chart.t_max:
        raise TruncationError("product leaves the sound window")
    out = 0
    for hpos, h in enumerate(out_chart.cochain_generators(f, t)):
        v = lift.value(y_deg.f, h)
        if evaluate_cochain(chart, y_deg.f, y_deg.t, y_cochain, v):
            out |= 1 << hpos
    return out


def yoneda_product(chart: ExtChart, x: ExtClass, y: ExtClass, lift_of_y: ChainMapLift | None = None) -> ExtClass:
    """x.y, computed as x o (lift of y)."""
    d = x.degree + y.degree
    if not chart.in_window(d):
        raise TruncationError(f"product degree {d} is outside the sound window")
    if x.is_zero() or y.is_zero():
        return ExtClass(d, 0)
    lift = lift_of_y or ChainMapLift(chart, y)
    zx = chart.cocycle(x.degree, x.vector)
    return chart.class_of(d, compose_cochain(chart, x.degree, zx, lift))


def module_product(sphere_chart: ExtChart, y: ExtClass, chart: ExtChart, x: ExtClass,
                   lift_of_x: ChainMapLift | None = None) -> ExtClass:
    """y.x for y in Ext of the sphere acting on x in Ext(M) (M resolved by chart)."""
    d = x.degree + y.degree
    if not chart.in_window(d):
        raise TruncationError(f"product degree {d} is outside the sound window")
    if x.is_zero() or y.is_zero():
        return ExtClass(d, 0)
    lift = lift_of_x or ChainMapLift(chart, x, target=sphere_chart.res)
    zy = sphere_chart.cocycle(y.degree, y.vector)
    return chart.class_of(d, compose_cochain(sphere_chart, y.degree, zy, lift, chart))


def solve_coboundary(chart: ExtChart, f: int, t: int, w: int, target: int):
    """A cochain V on C^f_t of weight w with delta V = target (on C^{f+1}_t)."""
    wd = chart.weights(f, t)
    wc = chart.weights(f + 1, t)
    dom = GradedFreeModule.from_weights([-x for x in wd], t)
    cod = GradedFreeModule.from_weights([-x for x in wc], t, prefix="c")
    m = TauMatrix(dom, cod, chart.delta_columns(f, t))
    if target == 0:
        return 0
    sol = solve(m, TauVector(target, -w))
    if sol is None:
        return None
    return sol.bits


@dataclass
class MasseyResult:
    representative: ExtClass
    indeterminacy: list = field(default_factory=list)
    unique: bool = True

    def normalized(self) -> int:
        """Representative vector reduced modulo the indeterminacy."""
        piv = _echelon(c.vector for c in self.indeterminacy)
        return _reduce_full(self.representative.vector, piv)

    def contains(self, x: ExtClass) -> bool:
        piv = _echelon(c.vector for c in self.indeterminacy)
        return _reduce_full(self.representative.vector ^ x.vector, piv) == 0


def _echelon(vectors) -> dict:
    piv = {}
    for v in vectors:
        v = _reduce_full(v, piv)
        if v:
            piv[v.bit_length() - 1] = v
    return piv


def _reduce_full(v: int, piv: dict) -> int:
    out = 0
    while v:
        lb = v.bit_length() - 1
        p = piv.get(lb)
        if p is None:
            out |= 1 << lb
            v ^= 1 << lb
        else:
            v ^= p
    return out


def span_basis(vectors) -> list:
    return sorted(_echelon(vectors).values())


def cell_classes(chart: ExtChart, d: TriDegree) -> list:
    if not chart.in_window(d) or d.s < 0:
        return []
    return [ExtClass(d, 1 << k) for k in range(chart.dim(d))]


def massey_triple(chart: ExtChart, a: ExtClass, b: ExtClass, c: ExtClass,
                  lift_c: ChainMapLift | None = None, indeterminacy: bool = True) -> MasseyResult:
    shift = TriDegree(1, -1, 0)
    target = a.degree + b.degree + c.degree + shift
    if not chart.in_window(target):
        raise TruncationError(f"<a,b,c> lands in {target}, outside the sound window")
    lb = ChainMapLift(chart, b)
    lc = lift_c or ChainMapLift(chart, c)
    ab = yoneda_product(chart, a, b, lb)
    if not ab.is_zero():
        raise ValueError(f"a.b is nonzero at {ab.degree}")
    bc = yoneda_product(chart, b, c, lc)
    if not bc.is_zero():
        raise ValueError(f"b.x is nonzero at {bc.degree}")
    fa, fb, fc = a.f, b.f, c.f
    ta, tb, tc = a.degree.t, b.degree.t, c.degree.t
    za = chart.cocycle(a.degree, a.vector)
    zb = chart.cocycle(b.degree, b.vector)
    # V with delta V = a o b_{fa}
    ab_cochain = compose_cochain(chart, a.degree, za, lb)
    V = solve_coboundary(chart, fa + fb - 1, ta + tb, a.degree.w + b.degree.w, ab_cochain)
    # U with delta U = b o c_{fb}
    bc_cochain = compose_cochain(chart, b.degree, zb, lc)
    U = solve_coboundary(chart, fb + fc - 1, tb + tc, b.degree.w + c.degree.w, bc_cochain)
    if V is None or U is None:
        raise ArithmeticError("null-cochain not found although the product vanishes")
    # null-homotopy H of b o c, H_n : P_{fb+fc-1+n} -> P_n
    res = chart.res
    tbc = tb + tc
    fbc = fb + fc
    H = {}
    u_gens = chart.cochain_generators(fbc - 1, tbc)

    def H_value(n, j):
        key = (n, j)
        if key in H:
            return H[key]
        f = fbc - 1 + n
        g = res.gens[f][j]
        t = g.t - tbc
        if t < 0:
            v = 0
        elif n == 0:
            v = 0
            if t == 0:
                v = (U >> u_gens.index(j)) & 1
        else:
            # d H_n(g) = (b o c)_{n-1}(g) + H_{n-1}(d g)
            y = lb.apply(n - 1, g.t - tc, lc.value(fb + n - 1, j)) if g.t - tc >= 0 else 0
            y ^= H_apply(n - 1, g.t, g.d)
            v = 0
            if y:
                v = res.lift(n, t, y)
                if v is None:
                    raise ArithmeticError("null-homotopy step failed")
        H[key] = v
        return v

    def H_apply(n, t_src, v):
        f = fbc - 1 + n
        out = 0
        if t_src - tbc < 0:
            return 0
        for j, tq, iq in res.decode(f, t_src, v):
            img = H_value(n, j)
            if img:
                out ^= res.act(tq, iq, n, res.gens[f][j].t - tbc, img)
        return out

    ftot = fa + fb + fc - 1
    ttot = ta + tb + tc
    rep = 0
    for hpos, h in enumerate(chart.cochain_generators(ftot, ttot)):
        bit = 0
        if V:
            bit ^= evaluate_cochain(chart, fa + fb - 1, ta + tb, V, lc.value(fa + fb - 1, h))
        bit ^= evaluate_cochain(chart, fa, ta, za, H_value(fa, h))
        if bit:
            rep |= 1 << hpos
    rep_class = chart.class_of(target, rep)
    result = MasseyResult(rep_class, [], True)
    if indeterminacy:
        result.indeterminacy = massey_indeterminacy(chart, a, b, c, lc)
        result.unique = not result.indeterminacy
    return result


def massey_indeterminacy(chart: ExtChart, a, b, c, lift_c=None) -> list:
    shift = TriDegree(1, -1, 0)
    target = a.degree + b.degree + c.degree + shift
    vecs = []
    for y in cell_classes(chart, b.degree + c.degree + shift):
        vecs.append(yoneda_product(chart, a, y).vector)
    left = cell_classes(chart, a.degree + b.degree + shift)
    if left:
        lc = lift_c or ChainMapLift(chart, c)
        for y in left:
            vecs.append(yoneda_product(chart, y, c, lc).vector)
    return [ExtClass(target, v) for v in span_basis(vecs)]


def h_class(chart: ExtChart, i: int) -> ExtClass:
    return chart.unique_class(h_degree(i))


def h0_power(chart: ExtChart, k: int) -> ExtClass:
    return chart.unique_class(TriDegree(0, k, 0))


def periodicity_apply(chart: ExtChart, r: int, x: ExtClass, lift_x=None, indeterminacy=True) -> MasseyResult:
    """P_r(x) = <h_{r+1}, h0^{2^r}, x>."""
    if r < 2:
        raise ValueError("the periodicity operator needs r >= 2")
    a = h_class(chart, r + 1)
    b = h0_power(chart, 2 ** r)
    return massey_triple(chart, a, b, x, lift_x, indeterminacy)
