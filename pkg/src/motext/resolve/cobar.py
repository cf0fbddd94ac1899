"""Reduced cobar complex: an oracle for Ext that uses only the coproduct,
the coaction and F2[tau] homology.

C^f_t is spanned over F2[tau] by cells [a_1|...|a_f]x with a_i nonunit basis
monomials and x a comodule generator, internal degrees summing to t.  The
weight of a cell is the sum of the weights; a coboundary term from a
coproduct or coaction constant tau^k lowers the weight by k, so only F2 bits
are stored and the exponent is recovered from the weights.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product

from ..hopf import A, Comodule, HopfPresentation, monomial_basis, reduced_coproduct, sphere
from ..taulin import FilteredHomology, bits_of
from ..trigrade import TriDegree


class CobarComplex:
    def __init__(self, p: HopfPresentation, M: Comodule | None = None, t_max: int = 20):
        self.p = p
        self.M = M or sphere()
        self.t_max = t_max
        self.basis = [[m for m in monomial_basis(p, t) if not m.is_unit()] if t > 0 else []
                      for t in range(t_max + 1)]
        self.gens = {}
        for name, d in self.M.generators:
            self.gens.setdefault(d.t, []).append(name)
        self.gen_w = {name: d.w for name, d in self.M.generators}
        self._cells = {}
        self._index = {}
        self._rcop = {}
        self._rcoact = {}
        for name in self.gen_w:
            terms = []
            for k, mono, g2 in self.M.coaction[name]:
                if not mono.is_unit():
                    terms.append((mono, g2))
            self._rcoact[name] = terms
        self._homology = {}

    def _reduced(self, m):
        r = self._rcop.get(m)
        if r is None:
            r = [(a, b) for (a, b), _ in reduced_coproduct(self.p, m)]
            self._rcop[m] = r
        return r

    def cells(self, f: int, t: int) -> list:
        key = (f, t)
        c = self._cells.get(key)
        if c is None:
            if f == 0:
                c = [((), g) for g in self.gens.get(t, [])]
            else:
                c = []
                for ta in range(1, t + 1):
                    rest = self.cells(f - 1, t - ta)
                    if not rest:
                        continue
                    for a in self.basis[ta]:
                        for tup, g in rest:
                            c.append(((a,) + tup, g))
            self._cells[key] = c
            self._index[key] = {cell: n for n, cell in enumerate(c)}
        return c

    def size(self, f: int, t: int) -> int:
        return len(self.cells(f, t))

    def weights(self, f: int, t: int) -> list:
        return [sum(a.w for a in tup) + self.gen_w[g] for tup, g in self.cells(f, t)]

    def coboundary(self, f: int, t: int) -> list:
        """Columns indexed by C^f_t, bitsets over C^{f+1}_t."""
        src = self.cells(f, t)
        self.cells(f + 1, t)
        idx = self._index[(f + 1, t)]
        cols = []
        for tup, g in src:
            acc = 0
            for i, a in enumerate(tup):
                head, tail = tup[:i], tup[i + 1:]
                for m1, m2 in self._reduced(a):
                    acc ^= 1 << idx[(head + (m1, m2) + tail, g)]
            for mono, g2 in self._rcoact[g]:
                acc ^= 1 << idx[(tup + (mono,), g2)]
            cols.append(acc)
        return cols

    def homology(self, f: int, t: int) -> FilteredHomology:
        key = (f, t)
        h = self._homology.get(key)
        if h is None:
            u_mid = [-w for w in self.weights(f, t)]
            d_out = self.coboundary(f, t)
            if f > 0:
                u_in = [-w for w in self.weights(f - 1, t)]
                d_in = self.coboundary(f - 1, t)
            else:
                u_in, d_in = [], []
            h = FilteredHomology(u_mid, d_out, u_in, d_in)
            self._homology[key] = h
        return h

    def dim(self, d: TriDegree) -> int:
        if d.s < 0 or d.t > self.t_max:
            return 0
        return self.homology(d.f, d.t).rank_at(-d.w)

    def summands(self, s: int, f: int) -> list:
        return [(-u, k) for _, u, k in self.homology(f, s + f).summands]

    # ------------------------------------------------------ cochains
    def slice_cells(self, f: int, t: int, w: int) -> list:
        """Positions of cells usable at weight w (cell weight >= w)."""
        return [n for n, x in enumerate(self.weights(f, t)) if x >= w]

    def delta(self, f: int, t: int, cochain: int) -> int:
        cols = self._delta_cache(f, t)
        out = 0
        for n in bits_of(cochain):
            out ^= cols[n]
        return out

    def _delta_cache(self, f, t):
        key = ("d", f, t)
        c = self._homology.get(key)
        if c is None:
            c = self.coboundary(f, t)
            self._homology[key] = c
        return c

    def juxtapose(self, f1: int, t1: int, x: int, f2: int, t2: int, y: int) -> int:
        """Product [x|y] of two cochains of the sphere complex."""
        c1, c2 = self.cells(f1, t1), self.cells(f2, t2)
        self.cells(f1 + f2, t1 + t2)
        idx = self._index[(f1 + f2, t1 + t2)]
        out = 0
        for i in bits_of(x):
            for j in bits_of(y):
                cell = (c1[i][0] + c2[j][0], c2[j][1])
                out ^= 1 << idx[cell]
        return out

    def cell_cochain(self, f: int, t: int, words) -> int:
        """Cochain from a list of cell words (tuples of monomials)."""
        self.cells(f, t)
        idx = self._index[(f, t)]
        g = self.M.generators[0][0]
        out = 0
        for word in words:
            out ^= 1 << idx[(tuple(word), g)]
        return out

    def class_vector(self, f: int, t: int, w: int, cocycle: int):
        return self.homology(f, t).coordinates(cocycle, -w)


def _slice_span(cx, f, t, w):
    return cx.slice_cells(f, t, w)


def _enumerate_slice(cx, f, t, w, limit=20):
    pos = _slice_span(cx, f, t, w)
    if len(pos) > limit:
        raise ValueError(f"slice C^{f}_{t} at weight {w} has {len(pos)} cells; too many to enumerate")
    for mask in range(1 << len(pos)):
        v = 0
        for k, p in enumerate(pos):
            if (mask >> k) & 1:
                v |= 1 << p
        yield v


def massey_defining_systems(cx: "CobarComplex", a, b, c, limit: int = 20) -> set:
    """All values of <a,b,c> over every defining system.

    a, b, c are (f, t, w, cocycle) in the sphere cobar complex.  Every
    representative cocycle of each class and every pair of null-cochains is
    enumerated; the result is the set of class vectors of [U|c] + [a|V].
    """
    def reps(x):
        f, t, w, z = x
        out = []
        for y in _enumerate_slice(cx, f - 1, t, w, limit) if f > 0 else [0]:
            out.append(z ^ (cx.delta(f - 1, t, y) if f > 0 else 0))
        return sorted(set(out))

    fa, ta, wa, _ = a
    fb, tb, wb, _ = b
    fc, tc, wc, _ = c
    ftot, ttot, wtot = fa + fb + fc - 1, ta + tb + tc, wa + wb + wc
    values = set()
    u_cands = list(_enumerate_slice(cx, fa + fb - 1, ta + tb, wa + wb, limit))
    v_cands = list(_enumerate_slice(cx, fb + fc - 1, tb + tc, wb + wc, limit))
    for za in reps(a):
        for zb in reps(b):
            for zc in reps(c):
                ab = cx.juxtapose(fa, ta, za, fb, tb, zb)
                bc = cx.juxtapose(fb, tb, zb, fc, tc, zc)
                us = [u for u in u_cands if cx.delta(fa + fb - 1, ta + tb, u) == ab]
                vs = [v for v in v_cands if cx.delta(fb + fc - 1, tb + tc, v) == bc]
                if not us or not vs:
                    raise ValueError("a.b or b.c is nonzero")
                for u in us:
                    uc = cx.juxtapose(fa + fb - 1, ta + tb, u, fc, tc, zc)
                    for v in vs:
                        av = cx.juxtapose(fa, ta, za, fb + fc - 1, tb + tc, v)
                        vec = cx.class_vector(ftot, ttot, wtot, uc ^ av)
                        if vec is None:
                            raise ArithmeticError("defining system value is not a cocycle")
                        values.add(vec)
    return values


def cobar_ext_dims(p: HopfPresentation, t_max: int, f_max: int, M: Comodule | None = None) -> dict:
    """{(s, f): [(weight, order)]} summand data for f <= f_max, t <= t_max."""
    cx = CobarComplex(p, M, t_max)
    out = {}
    for f in range(f_max + 1):
        for t in range(f, t_max + 1):
            sm = cx.summands(t - f, f)
            if sm:
                out[(t - f, f)] = sorted(sm, key=lambda x: (x[0], x[1] is None, x[1] or 0))
    return out


# ---------------------------------------------------------------- fast dims
#
# For a finite presentation the cells of C^f_t are words in the nonunit
# monomials, ranked in the same order as CobarComplex.cells.  Dimensions at
# weight w are read from rank profiles: with columns taken in increasing
# u = -weight, the rank of a coboundary restricted to cells of u <= u0 is the
# number of pivot columns among them, and
#   dim Ext^{f,t,w} = #{cells u <= -w} - rank(d_out | u <= -w) - rank(d_in | u <= -w).

import numpy as np
from numba import njit


@njit(cache=True)
def _pivot_flags(indptr, indices, n_rows):
    n_cols = indptr.shape[0] - 1
    owner = np.full(n_rows, -1, np.int64)
    store = [np.empty(0, np.int64) for _ in range(0)]
    flags = np.zeros(n_cols, np.bool_)
    for c in range(n_cols):
        cur = indices[indptr[c]:indptr[c + 1]].copy()
        while cur.shape[0] > 0:
            low = cur[-1]
            p = owner[low]
            if p < 0:
                owner[low] = len(store)
                store.append(cur)
                flags[c] = True
                break
            other = store[p]
            out = np.empty(cur.shape[0] + other.shape[0], np.int64)
            i = 0
            j = 0
            k = 0
            while i < cur.shape[0] and j < other.shape[0]:
                a = cur[i]
                b = other[j]
                if a < b:
                    out[k] = a
                    i += 1
                    k += 1
                elif b < a:
                    out[k] = b
                    j += 1
                    k += 1
                else:
                    i += 1
                    j += 1
            while i < cur.shape[0]:
                out[k] = cur[i]
                i += 1
                k += 1
            while j < other.shape[0]:
                out[k] = other[j]
                j += 1
                k += 1
            cur = out[:k]
    return flags


class FastCobar:
    """Vectorised cobar dimensions for the sphere over a finite presentation."""

    def __init__(self, p: HopfPresentation, t_max: int):
        if not p.finite:
            raise ValueError("FastCobar needs a finite presentation")
        self.p = p
        self.t_max = t_max
        monos = []
        for t in range(1, t_max + 1):
            monos.extend(m for m in monomial_basis(p, t) if not m.is_unit())
        self.monos = monos
        ids = {m: n for n, m in enumerate(monos)}
        self.deg = np.array([m.t for m in monos], np.int64)
        self.wt = np.array([m.w for m in monos], np.int64)
        K = len(monos)
        f_cap = t_max + 2
        N = np.zeros((f_cap + 1, t_max + 1), np.int64)
        N[0, 0] = 1
        for f in range(1, f_cap + 1):
            for t in range(t_max + 1):
                N[f, t] = sum(N[f - 1, t - d] for d in self.deg if d <= t)
        self.N = N
        off = np.zeros((f_cap + 1, t_max + 1, K), np.int64)
        for f in range(1, f_cap + 1):
            for t in range(t_max + 1):
                acc = 0
                for a in range(K):
                    off[f, t, a] = acc
                    if self.deg[a] <= t:
                        acc += N[f - 1, t - self.deg[a]]
        self.off = off
        self.split = []
        for a, m in enumerate(monos):
            for (m1, m2), _ in reduced_coproduct(p, m):
                self.split.append((a, ids[m1], ids[m2]))
        self._cells = {}
        self._profile = {}

    def cells(self, f: int, t: int) -> np.ndarray:
        key = (f, t)
        c = self._cells.get(key)
        if c is None:
            if f == 0:
                c = np.zeros((1 if t == 0 else 0, 0), np.int64)
            else:
                parts = []
                for a in range(len(self.monos)):
                    d = self.deg[a]
                    if d > t:
                        continue
                    rest = self.cells(f - 1, t - d)
                    if rest.shape[0]:
                        head = np.full((rest.shape[0], 1), a, np.int64)
                        parts.append(np.hstack([head, rest]))
                c = np.vstack(parts) if parts else np.zeros((0, f), np.int64)
            self._cells[key] = c
        return c

    def rank_words(self, words: np.ndarray, t: int) -> np.ndarray:
        n, f = words.shape
        r = np.zeros(n, np.int64)
        trem = np.full(n, t, np.int64)
        for pos in range(f):
            a = words[:, pos]
            r += self.off[f - pos, trem, a]
            trem -= self.deg[a]
        return r

    def weights(self, f: int, t: int) -> np.ndarray:
        c = self.cells(f, t)
        if f == 0:
            return np.zeros(c.shape[0], np.int64)
        return self.wt[c].sum(axis=1)

    def coboundary_edges(self, f: int, t: int):
        c = self.cells(f, t)
        src_all, dst_all = [], []
        for i in range(f):
            col = c[:, i]
            for a, m1, m2 in self.split:
                idx = np.nonzero(col == a)[0]
                if not idx.shape[0]:
                    continue
                sub = c[idx]
                n = idx.shape[0]
                new = np.hstack([sub[:, :i], np.full((n, 1), m1, np.int64),
                                 np.full((n, 1), m2, np.int64), sub[:, i + 1:]])
                src_all.append(idx)
                dst_all.append(self.rank_words(new, t))
        if not src_all:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        return np.concatenate(src_all), np.concatenate(dst_all)

    def rank_profile(self, f: int, t: int):
        """(sorted u of C^f_t cells, cumulative rank of the coboundary out of
        C^f_t over those columns)."""
        key = (f, t)
        pr = self._profile.get(key)
        if pr is None:
            u = -self.weights(f, t)
            order = np.lexsort((np.arange(u.shape[0]), u))
            n_rows = int(self.N[f + 1, t]) if f + 1 < self.N.shape[0] else 0
            src, dst = self.coboundary_edges(f, t)
            if src.shape[0]:
                pos = np.empty_like(order)
                pos[order] = np.arange(order.shape[0])
                col = pos[src]
                # sort by column then row; drop pairs occurring an even number of times
                key2 = col * max(n_rows, 1) + dst
                uniq, counts = np.unique(key2, return_counts=True)
                uniq = uniq[counts % 2 == 1]
                col = uniq // max(n_rows, 1)
                row = uniq % max(n_rows, 1)
                indptr = np.zeros(order.shape[0] + 1, np.int64)
                np.add.at(indptr, col + 1, 1)
                indptr = np.cumsum(indptr)
                flags = _pivot_flags(indptr, row.astype(np.int64), max(n_rows, 1))
            else:
                flags = np.zeros(order.shape[0], np.bool_)
            pr = (u[order], np.cumsum(flags))
            self._profile[key] = pr
        return pr

    @staticmethod
    def _prefix(profile, u0: int) -> tuple:
        us, cum = profile
        k = int(np.searchsorted(us, u0, side="right"))
        return k, (int(cum[k - 1]) if k else 0)

    def dim(self, s: int, f: int, w: int) -> int:
        t = s + f
        if s < 0 or t > self.t_max:
            return 0
        n, r_out = self._prefix(self.rank_profile(f, t), -w)
        r_in = self._prefix(self.rank_profile(f - 1, t), -w)[1] if f > 0 else 0
        return n - r_out - r_in

    def weight_span(self, f: int, t: int):
        w = self.weights(f, t)
        if not w.shape[0]:
            return None
        return int(w.min()), int(w.max())
