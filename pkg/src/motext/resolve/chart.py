"""Ext charts read off a minimal resolution.

The Hom complex in internal degree t has one F2[tau]-basis element g* per
generator g of P_f with t_g = t.  Its differential picks up tau^(w_h - w_g)
whenever a.g with a = 1 appears in d(h).  The cohomology is decomposed into
free and tau-torsion summands with FilteredHomology (weights negated, since
tau lowers the Ext weight).

A class at (s, f, w) is a bitset over the cell basis; the cell basis is a
list of kernel generators alive at weight w, each representing the cochain
sum of tau^(w_g - w) g* over its support.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ..taulin import FilteredHomology, bits_of
from ..trigrade import TriDegree, h_degree
from .engine import Resolution

UNCOMPUTED = None


@dataclass(frozen=True)
class ExtClass:
    degree: TriDegree
    vector: int          # bitset over the chart basis of the cell

    @property
    def f(self) -> int:
        return self.degree.f

    def is_zero(self) -> bool:
        return self.vector == 0

    def __add__(self, other: "ExtClass") -> "ExtClass":
        if other.degree != self.degree:
            raise ValueError("adding classes of different degrees")
        return ExtClass(self.degree, self.vector ^ other.vector)


class ExtChart:
    def __init__(self, res: Resolution, operators=(0, 1, 2, 3)):
        self.res = res
        self.t_max = res.t_max
        self.f_max = res.f_max
        self.op_indices = tuple(operators)
        self._cells = {}
        self._hi = {}

    # ---------------------------------------------------------- cochains
    def cochain_generators(self, f: int, t: int) -> list:
        return self.res.generators_at(f, t)

    def weights(self, f: int, t: int) -> list:
        return [self.res.gens[f][j].w for j in self.cochain_generators(f, t)]

    def delta_columns(self, f: int, t: int) -> list:
        """Coboundary C^f_t -> C^{f+1}_t as columns indexed by C^f_t."""
        src = self.cochain_generators(f, t)
        if f + 1 > self.f_max:
            raise ValueError("coboundary leaves the resolution window")
        tgt = self.cochain_generators(f + 1, t)
        cols = [0] * len(src)
        if not src or not tgt:
            return cols
        st = self.res.starts(f, t)
        for hpos, h in enumerate(tgt):
            d = self.res.gens[f + 1][h].d
            for n, j in enumerate(src):
                if (d >> st[j]) & 1:
                    cols[n] |= 1 << hpos
        return cols

    def homology(self, f: int, t: int) -> FilteredHomology:
        key = (f, t)
        h = self._cells.get(key)
        if h is None:
            if not (0 <= f < self.f_max and 0 <= t <= self.t_max):
                raise ValueError(f"cell f={f}, t={t} is outside the sound window")
            u_mid = [-w for w in self.weights(f, t)]
            d_out = self.delta_columns(f, t)
            if f > 0:
                u_in = [-w for w in self.weights(f - 1, t)]
                d_in = self.delta_columns(f - 1, t)
            else:
                u_in, d_in = [], []
            h = FilteredHomology(u_mid, d_out, u_in, d_in)
            self._cells[key] = h
        return h

    # ---------------------------------------------------------- cells
    def in_window(self, d: TriDegree) -> bool:
        return 0 <= d.f < self.f_max and 0 <= d.t <= self.t_max

    def dim(self, d: TriDegree):
        if not self.in_window(d):
            return UNCOMPUTED
        if d.s < 0:
            return 0
        return self.homology(d.f, d.t).rank_at(-d.w)

    def basis(self, d: TriDegree) -> list:
        return self.homology(d.f, d.t).basis_at(-d.w)

    def summands(self, s: int, f: int) -> list:
        """[(generator weight, order or None)] for the F2[tau]-module at (s, f)."""
        h = self.homology(f, s + f)
        return [(-u, k) for _, u, k in h.summands]

    def free_rank(self, s: int, f: int) -> int:
        return sum(1 for _, k in self.summands(s, f) if k is None)

    def weight_range(self, s: int, f: int):
        """(lowest, highest) weight with something new; below the lowest
        weight the cell is constant of dimension free_rank."""
        sm = self.summands(s, f)
        if not sm:
            return None
        hi = max(w for w, _ in sm)
        lo = min((w - k + 1) if k else w for w, k in sm)
        return lo, hi

    def nonzero_cells(self, w_floor: int | None = None):
        """Nonzero cells (s, f, w) in the sound window; free summands are
        listed down to w_floor (default: the cell's own lowest event)."""
        out = []
        for f in range(self.f_max):
            for t in range(f, self.t_max + 1):
                s = t - f
                rng = self.weight_range(s, f)
                if rng is None:
                    continue
                lo, hi = rng
                if w_floor is not None:
                    lo = min(lo, w_floor)
                for w in range(hi, lo - 1, -1):
                    d = TriDegree(s, f, w)
                    if self.dim(d):
                        out.append(d)
        return out

    def cocycle(self, d: TriDegree, vector: int) -> int:
        """Cochain (bitset over C^f_t) representing a class."""
        h = self.homology(d.f, d.t)
        basis = h.basis_at(-d.w)
        out = 0
        for n in bits_of(vector):
            out ^= h.representative(basis[n])
        return out

    def class_of(self, d: TriDegree, cochain: int) -> ExtClass:
        """Class of a cocycle of weight d.w."""
        if not self.in_window(d):
            raise ValueError(f"{d} is outside the sound window")
        if d.s < 0:
            if cochain:
                raise ValueError("nonzero cochain in negative stem")
            return ExtClass(d, 0)
        h = self.homology(d.f, d.t)
        v = h.coordinates(cochain, -d.w)
        if v is None:
            raise ValueError(f"cochain at {d} is not a cocycle")
        return ExtClass(d, v)

    def element(self, d: TriDegree, index: int = 0) -> ExtClass:
        return ExtClass(d, 1 << index)

    def unique_class(self, d: TriDegree) -> ExtClass:
        n = self.dim(d)
        if n != 1:
            raise ValueError(f"cell {d} has dimension {n}, expected 1")
        return ExtClass(d, 1)

    # ---------------------------------------------------------- operators
    def _hi_matrix(self, i: int, f: int, t: int) -> list:
        """For each generator h of P_{f+1} in degree t + 2^i, the bitset over
        C^f_t of generators g with Sq-dual(2^i).g in d(h)."""
        key = (i, f, t)
        m = self._hi.get(key)
        if m is None:
            ti = 2 ** i
            loc = self.res.alg.hi_index(i)
            t2 = t + ti
            src = self.cochain_generators(f, t)
            tgt = self.cochain_generators(f + 1, t2)
            m = []
            if loc is not None and src:
                st = self.res.starts(f, t2)
                ia = loc[1]
                for h in tgt:
                    d = self.res.gens[f + 1][h].d
                    acc = 0
                    for n, j in enumerate(src):
                        if (d >> (st[j] + ia)) & 1:
                            acc |= 1 << n
                    m.append(acc)
            else:
                m = [0] * len(tgt)
            self._hi[key] = m
        return m

    def hi_cochain(self, i: int, f: int, t: int, z: int) -> int:
        out = 0
        for hpos, row in enumerate(self._hi_matrix(i, f, t)):
            if (row & z).bit_count() & 1:
                out |= 1 << hpos
        return out

    def multiply_h(self, i: int, x: ExtClass) -> ExtClass:
        d2 = x.degree + h_degree(i)
        z = self.cocycle(x.degree, x.vector)
        return self.class_of(d2, self.hi_cochain(i, x.f, x.degree.t, z))

    def multiply_tau(self, x: ExtClass) -> ExtClass:
        d2 = TriDegree(x.degree.s, x.degree.f, x.degree.w - 1)
        h = self.homology(x.f, x.degree.t)
        src = h.basis_at(-x.degree.w)
        dst = {l: n for n, l in enumerate(h.basis_at(-d2.w))}
        out = 0
        for n in bits_of(x.vector):
            l = src[n]
            if l in dst:
                out ^= 1 << dst[l]
        return ExtClass(d2, out)

    def operator_matrix(self, op, d: TriDegree) -> list:
        """Columns (bitsets over the target basis) of op on the cell d.
        op is 'tau' or an integer i for h_i."""
        n = self.dim(d) or 0
        cols = []
        for k in range(n):
            x = ExtClass(d, 1 << k)
            y = self.multiply_tau(x) if op == "tau" else self.multiply_h(op, x)
            cols.append(y.vector)
        return cols

    def operator_target(self, op, d: TriDegree) -> TriDegree:
        if op == "tau":
            return TriDegree(d.s, d.f, d.w - 1)
        return d + h_degree(op)

    def operator_rank(self, op, d: TriDegree):
        tgt = self.operator_target(op, d)
        if not self.in_window(tgt):
            return UNCOMPUTED
        return gf2_rank(self.operator_matrix(op, d))


def gf2_rank(cols) -> int:
    piv = {}
    r = 0
    for v in cols:
        while v:
            lb = v.bit_length() - 1
            p = piv.get(lb)
            if p is None:
                piv[lb] = v
                r += 1
                break
            v ^= p
    return r


def ext_chart(res: Resolution) -> ExtChart:
    return ExtChart(res)
