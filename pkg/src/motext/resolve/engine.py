"""Minimal free resolutions over the dual algebra of a presentation.

P_f is free on generators g with internal degree t_g and weight w_g.  Its
F2[tau]-basis in degree t is the set of a.g with a running over the algebra
basis in degree t - t_g; generators are kept in order of creation, so the
basis in degree t is a concatenation of one block per generator.

Elements are bitsets over that basis plus a weight; basis element a.g sits
at weight w_a + w_g and appears with coefficient tau^(weight - w_a - w_g).
"""
from __future__ import annotations

import json
import os
from bisect import bisect_right
from dataclasses import dataclass, field

from ..hopf import Comodule, HopfPresentation, PRESENTATIONS, dump_comodule, load_comodule
from ..taulin import bits_of, reduce_vector
from ..trigrade import TriDegree
from .algebra import DualAlgebra, ModuleData


class TruncationError(ValueError):
    pass


@dataclass
class Generator:
    name: str
    f: int
    t: int
    w: int
    d: int                      # boundary, bitset over P_{f-1} (or M) in degree t
    terms: list = field(default_factory=list)   # decoded boundary

    @property
    def degree(self) -> TriDegree:
        return TriDegree(self.t - self.f, self.f, self.w)


class Resolution:
    def __init__(self, p: HopfPresentation, M: Comodule, t_max: int, f_max: int,
                 alg: DualAlgebra | None = None, build: bool = True):
        if t_max < 0 or f_max < 0:
            raise ValueError("bounds must be nonnegative")
        if M.generators and M.top_degree > t_max:
            raise TruncationError(
                f"window t <= {t_max} cannot hold the top cell of {M.name} (t = {M.top_degree})")
        self.p = p
        self.M = M
        self.t_max = t_max
        self.f_max = f_max
        self.alg = alg if alg is not None and alg.t_max >= t_max else DualAlgebra(p, t_max)
        self.mod = ModuleData(M, self.alg)
        self.gens = [[] for _ in range(f_max + 1)]
        self.upto = [[0] * (t_max + 1) for _ in range(f_max + 1)]
        self._starts = {}
        self._solvers = {}
        self.t_done = -1
        if build:
            self.extend()

    # ------------------------------------------------------------ layout
    def starts(self, f: int, t: int) -> list:
        """Block start offsets of P_f in degree t; last entry is the total size."""
        key = (f, t)
        s = self._starts.get(key)
        if s is None:
            n = self.upto[f][t]
            dims = self.alg.dims
            gens = self.gens[f]
            s = [0] * (n + 1)
            acc = 0
            for j in range(n):
                s[j] = acc
                acc += dims[t - gens[j].t]
            s[n] = acc
            if t <= self.t_done:
                self._starts[key] = s
        return s

    def size(self, f: int, t: int) -> int:
        if f < 0:
            return len(self.mod.basis(t))
        return self.starts(f, t)[-1]

    def basis_weights(self, f: int, t: int) -> list:
        if f < 0:
            return self.mod.weights(t)
        out = []
        aw = self.alg.weights
        for g in self.gens[f][: self.upto[f][t]]:
            wg = g.w
            out.extend(wg + x for x in aw[t - g.t])
        return out

    def decode(self, f: int, t: int, v: int) -> list:
        """Split an element of P_f in degree t into (gen index, degree of a, index of a)."""
        st = self.starts(f, t)
        gens = self.gens[f]
        out = []
        for b in bits_of(v):
            j = bisect_right(st, b) - 1
            out.append((j, t - gens[j].t, b - st[j]))
        return out

    def basis_element(self, f: int, t: int, j: int, ia: int) -> int:
        return self.starts(f, t)[j] + ia

    # ------------------------------------------------------------ arithmetic
    def act(self, ta: int, ia: int, f: int, t: int, v: int) -> int:
        """a.v for v in P_f (f >= 0) or M (f = -1) in degree t."""
        if f < 0:
            out = 0
            act = self.mod.act
            names = self.mod.basis(t)
            for b in bits_of(v):
                out ^= act.get((ta, ia, names[b]), 0)
            return out
        prod = self.alg.prod[ta]
        st = self.starts(f, t + ta)
        out = 0
        for j, ts, i in self.decode(f, t, v):
            out ^= prod[ts][ia][i] << st[j]
        return out

    def image_of_generator_block(self, f: int, j: int, t: int) -> list:
        """d(a.g_j) for every algebra basis element a in degree t - t_j."""
        g = self.gens[f][j]
        ta = t - g.t
        na = self.alg.dims[ta]
        if f == 0:
            act = self.mod.act
            names = self.mod.basis(g.t)
            ys = [names[b] for b in bits_of(g.d)]
            out = []
            for ia in range(na):
                v = 0
                for y in ys:
                    v ^= act.get((ta, ia, y), 0)
                out.append(v)
            return out
        prod = self.alg.prod[ta]
        st = self.starts(f - 1, t)
        out = [0] * na
        for k, ts, i in g.terms:
            rows = prod[ts]
            sh = st[k]
            for ia in range(na):
                x = rows[ia][i]
                if x:
                    out[ia] ^= x << sh
        return out

    def differential(self, f: int, t: int, v: int) -> int:
        """d of an element of P_f in degree t (lands in P_{f-1} or M)."""
        out = 0
        for j, ta, ia in self.decode(f, t, v):
            g = self.gens[f][j]
            out ^= self.act(ta, ia, f - 1, g.t, g.d)
        return out

    # ------------------------------------------------------------ building
    def extend(self):
        for t in range(self.t_done + 1, self.t_max + 1):
            kernel = [(1 << i, w) for i, w in enumerate(self.mod.weights(t))]
            for f in range(self.f_max + 1):
                kernel = self._stage(f, t, kernel, need_kernel=f < self.f_max)
            self.t_done = t

    def _stage(self, f: int, t: int, prev_kernel: list, need_kernel: bool) -> list:
        gens = self.gens[f]
        n_old = self.upto[f][t - 1] if t > 0 else 0
        self.upto[f][t] = n_old
        aw = self.alg.weights
        items = []
        if n_old:
            st = self.starts(f, t)
            for j in range(n_old):
                g = gens[j]
                ws = aw[t - g.t]
                imgs = self.image_of_generator_block(f, j, t)
                base = st[j]
                for ia, v in enumerate(imgs):
                    items.append((g.w + ws[ia], 0, base + ia, v))
        for n, (v, w) in enumerate(prev_kernel):
            items.append((w, 1, n, v))
        items.sort(key=lambda it: (it[0], it[1], it[2]))
        total_old = self.starts(f, t)[-1] if n_old else 0
        piv = {}
        kernel = []
        new = []
        slot = {}
        for w, typ, idx, v in items:
            if typ == 0:
                comb = (1 << idx) if need_kernel else 0
                while v:
                    lb = v.bit_length() - 1
                    p = piv.get(lb)
                    if p is None:
                        piv[lb] = (v, comb)
                        break
                    v ^= p[0]
                    comb ^= p[1]
                else:
                    if need_kernel:
                        kernel.append((comb, w))
            else:
                orig = v
                r, comb = reduce_vector(v, piv, 0)
                if r:
                    col = total_old + len(new)
                    if need_kernel:
                        comb ^= 1 << col
                    piv[r.bit_length() - 1] = (r, comb)
                    i = slot.get(w, 0)
                    slot[w] = i + 1
                    new.append(Generator(f"g_{f},{t},{w},{i}", f, t, w, orig))
        for g in new:
            if f > 0:
                g.terms = self.decode(f - 1, t, g.d)
            gens.append(g)
        self.upto[f][t] = len(gens)
        self._starts.pop((f, t), None)
        return kernel

    # ------------------------------------------------------------ solving
    def solver(self, f: int, t: int) -> dict:
        """Weight-ordered echelon of d_f in degree t with combinations."""
        key = (f, t)
        s = self._solvers.get(key)
        if s is None:
            cols = []
            st = self.starts(f, t)
            for j in range(self.upto[f][t]):
                g = self.gens[f][j]
                ws = self.alg.weights[t - g.t]
                for ia, v in enumerate(self.image_of_generator_block(f, j, t)):
                    cols.append((g.w + ws[ia], st[j] + ia, v))
            cols.sort(key=lambda c: (c[0], c[1]))
            s = {}
            for w, idx, v in cols:
                v, comb = reduce_vector(v, s, 1 << idx)
                if v:
                    s[v.bit_length() - 1] = (v, comb)
            if len(self._solvers) > 4096:
                self._solvers.clear()
            self._solvers[key] = s
        return s

    def lift(self, f: int, t: int, y: int):
        """x in P_f with d x = y (y in P_{f-1}, or M when f = 0); None if y is
        not a boundary.  The weight of x is that of y."""
        if f > self.f_max or t > self.t_max:
            raise TruncationError(f"lift needs P_{f} in degree {t}, outside the window")
        v, comb = reduce_vector(y, self.solver(f, t))
        if v:
            return None
        return comb

    # ------------------------------------------------------------ queries
    def generators_at(self, f: int, t: int) -> list:
        """Indices of P_f generators of internal degree exactly t."""
        lo = self.upto[f][t - 1] if t > 0 else 0
        return list(range(lo, self.upto[f][t]))

    def generator_counts(self) -> dict:
        out = {}
        for f, gl in enumerate(self.gens):
            for g in gl:
                key = (g.t - f, f, g.w)
                out[key] = out.get(key, 0) + 1
        return out

    def sound(self, s: int, f: int) -> bool:
        return 0 <= f < self.f_max and s + f <= self.t_max

    # ------------------------------------------------------------ persistence
    def save(self, path: str):
        os.makedirs(path, exist_ok=True)
        meta = {"algebra": self.p.name, "t_max": self.t_max, "f_max": self.f_max,
                "module": dump_comodule(self.M), "module_name": self.M.name}
        with open(os.path.join(path, "resolution.json"), "w") as fh:
            json.dump(meta, fh, indent=1)
        with open(os.path.join(path, "generators.tsv"), "w") as fh:
            fh.write("f\tt\tw\tname\tboundary\n")
            for f, gl in enumerate(self.gens):
                for g in gl:
                    fh.write(f"{f}\t{g.t}\t{g.w}\t{g.name}\t{g.d:x}\n")

    @classmethod
    def load(cls, path: str) -> "Resolution":
        with open(os.path.join(path, "resolution.json")) as fh:
            meta = json.load(fh)
        p = next(q for q in PRESENTATIONS.values() if q.name == meta["algebra"])
        M = load_comodule(meta["module"], p, meta.get("module_name", "M"))
        res = cls(p, M, meta["t_max"], meta["f_max"], build=False)
        with open(os.path.join(path, "generators.tsv")) as fh:
            next(fh)
            rows = [line.rstrip("\n").split("\t") for line in fh if line.strip()]
        for f_s, t_s, w_s, name, d in rows:
            f, t = int(f_s), int(t_s)
            res.gens[f].append(Generator(name, f, t, int(w_s), int(d, 16)))
        for f in range(res.f_max + 1):
            ts = [g.t for g in res.gens[f]]
            for t in range(res.t_max + 1):
                res.upto[f][t] = bisect_right(ts, t)
        res.t_done = res.t_max
        for f in range(1, res.f_max + 1):
            for g in res.gens[f]:
                g.terms = res.decode(f - 1, g.t, g.d)
        return res


def minimal_resolution(p: HopfPresentation, M: Comodule, t_max: int, f_max: int) -> Resolution:
    return Resolution(p, M, t_max, f_max)
