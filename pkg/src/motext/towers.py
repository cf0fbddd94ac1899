"""Derived groups built from Ext charts by long-exact-sequence bookkeeping.

A graded module here is anything answering, per cell (s, f, w), a dimension
and operator matrices (tau, h0, h1, h2 and optional extras such as P).  Derived
groups are direct sums of parts; each part is a kernel or cokernel of a power
of an operator on a parent module, indexed with a fixed cell offset:

  [S/theta, N]_(s,f,w)  = coker(theta) at N_(s+1, f-1, w) + deg(theta)
                          + ker(theta) on N_(s,f,w)
  [S, N/h^inf] pieces   = colimits of the same with theta = h^k, k -> inf

Colimit parts choose k per cell once the ladder has stabilised inside the
window; cells where it has not are marked unstable.  Operators on a sum act
part by part (hidden extensions between parts are not resolved) unless an
operator model with the same dimensions is attached.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .trigrade import H0, H1, H2, TriDegree

TAU_DEG = TriDegree(0, 0, -1)
BASE_OPS = {"tau": TAU_DEG, "h0": H0, "h1": H1, "h2": H2}
NEG_INF = -10 ** 9
MAX_SCAN = 64
# ladder steps without change required before a colimit counts as settled
CONFIRM = 3


class Uncomputed(Exception):
    """A cell or operator needs data outside the computed window."""


# ------------------------------------------------------------- F2 helpers

def echelon(vectors) -> dict:
    """Echelon form {leading bit: vector} of the span."""
    piv = {}
    for v in vectors:
        while v:
            lb = v.bit_length() - 1
            p = piv.get(lb)
            if p is None:
                piv[lb] = v
                break
            v ^= p
    return piv


def apply_matrix(cols: list, v: int) -> int:
    out = 0
    k = 0
    while v:
        if v & 1:
            out ^= cols[k]
        v >>= 1
        k += 1
    return out


def compose(a: list, b: list) -> list:
    """Matrix of a o b (columns of b are inputs of a)."""
    return [apply_matrix(a, c) for c in b]


def kernel(cols: list) -> list:
    """Basis of the kernel of a matrix given by columns (bitsets over the source)."""
    piv = {}
    basis = []
    for i, c in enumerate(cols):
        v, comb = c, 1 << i
        while v:
            lb = v.bit_length() - 1
            p = piv.get(lb)
            if p is None:
                piv[lb] = (v, comb)
                break
            v ^= p[0]
            comb ^= p[1]
        if not v:
            basis.append(comb)
    return basis


def rank(cols) -> int:
    return len(echelon(cols))


def solve_in_span(cols: list, target: int):
    """Combination (bitset over cols) hitting target, or None."""
    piv = {}
    for i, c in enumerate(cols):
        v, comb = c, 1 << i
        while v:
            lb = v.bit_length() - 1
            p = piv.get(lb)
            if p is None:
                piv[lb] = (v, comb)
                break
            v ^= p[0]
            comb ^= p[1]
    v, comb = target, 0
    while v:
        lb = v.bit_length() - 1
        p = piv.get(lb)
        if p is None:
            return None
        v ^= p[0]
        comb ^= p[1]
    return comb


class Subspace:
    """A subspace with a chosen basis, supporting coordinates."""

    def __init__(self, basis: list):
        self.basis = list(basis)
        self._piv = {}
        for i, b in enumerate(self.basis):
            v, comb = b, 1 << i
            while v:
                lb = v.bit_length() - 1
                p = self._piv.get(lb)
                if p is None:
                    self._piv[lb] = (v, comb)
                    break
                v ^= p[0]
                comb ^= p[1]
            if not v:
                raise ValueError("dependent basis")

    def __len__(self):
        return len(self.basis)

    def coords(self, v: int) -> int:
        comb = 0
        while v:
            lb = v.bit_length() - 1
            p = self._piv.get(lb)
            if p is None:
                raise ValueError("vector outside the subspace")
            v ^= p[0]
            comb ^= p[1]
        return comb


class Quotient:
    """ambient (dimension n) modulo the span of relations."""

    def __init__(self, n: int, relations: list):
        self.n = n
        self.piv = {}
        for r in relations:
            v = r
            while v:
                lb = v.bit_length() - 1
                p = self.piv.get(lb)
                if p is None:
                    self.piv[lb] = v
                    break
                v ^= p
        self.free = [i for i in range(n) if i not in self.piv]
        self.pos = {i: k for k, i in enumerate(self.free)}

    def __len__(self):
        return len(self.free)

    def reduce(self, v: int) -> int:
        out = 0
        while v:
            lb = v.bit_length() - 1
            p = self.piv.get(lb)
            if p is None:
                out |= 1 << lb
                v ^= 1 << lb
            else:
                v ^= p
        return out

    def coords(self, v: int) -> int:
        v = self.reduce(v)
        out = 0
        while v:
            lb = v.bit_length() - 1
            out |= 1 << self.pos[lb]
            v ^= 1 << lb
        return out

    def lift(self, k: int) -> int:
        return 1 << self.free[k]


# ------------------------------------------------------------- modules

class GradedModule:
    """Protocol: dim(d), op(name, d), bounds(s, f), op_degree(name)."""

    name = "module"
    s_min = NEG_INF
    f_min = NEG_INF

    def op_degree(self, name: str) -> TriDegree:
        return BASE_OPS[name]

    def has_op(self, name: str) -> bool:
        return name in BASE_OPS

    def dim(self, d: TriDegree) -> int:
        raise NotImplementedError

    def op(self, name: str, d: TriDegree) -> list:
        raise NotImplementedError

    def bounds(self, s: int, f: int):
        """(lo, hi): zero above hi, tau-stable at and below lo - 1; None if the
        column is zero."""
        raise NotImplementedError

    def op_power(self, name: str, k: int, d: TriDegree) -> list:
        deg = self.op_degree(name)
        m = None
        cur = d
        for _ in range(k):
            step = self.op(name, cur)
            m = step if m is None else compose(step, m)
            cur = cur + deg
        if m is None:
            return [1 << i for i in range(self.dim(d))]
        return m

    def stable_dim(self, s: int, f: int) -> int:
        b = self.bounds(s, f)
        if b is None:
            return 0
        return self.dim(TriDegree(s, f, b[0] - 1))

    def weights(self, s: int, f: int):
        """Weights from the top down to one below the stable floor."""
        b = self.bounds(s, f)
        if b is None:
            return []
        return list(range(b[1], b[0] - 2, -1))


class ExtModule(GradedModule):
    """An Ext chart viewed as a module; cell d is chart cell d + shift.

    extra maps an operator name to (degree, callable(ExtClass) -> ExtClass)."""

    def __init__(self, chart, shift: TriDegree = TriDegree(0, 0, 0), extra=None, name="Ext"):
        self.chart = chart
        self.shift = shift
        self.extra = dict(extra or {})
        self.name = name
        self.s_min = -shift.s
        self.f_min = -shift.f
        self._ops = {}

    def op_degree(self, name):
        if name in self.extra:
            return self.extra[name][0]
        return BASE_OPS[name]

    def has_op(self, name):
        return name in BASE_OPS or name in self.extra

    def _cell(self, d):
        return d + self.shift

    def _zero(self, c) -> bool:
        return c.s < 0 or c.f < 0

    def dim(self, d):
        c = self._cell(d)
        if self._zero(c):
            return 0
        n = self.chart.dim(c)
        if n is None:
            raise Uncomputed(f"Ext cell {c} is outside the window")
        return n

    def op(self, name, d):
        key = (name, d)
        m = self._ops.get(key)
        if m is not None:
            return m
        deg = self.op_degree(name)
        n = self.dim(d)
        if n == 0:
            m = []
        elif self.dim(d + deg) == 0:
            m = [0] * n
        else:
            c = self._cell(d)
            if name in self.extra:
                from .resolve.chart import ExtClass
                fn = self.extra[name][1]
                m = [fn(ExtClass(c, 1 << i)).vector for i in range(n)]
            else:
                opname = "tau" if name == "tau" else int(name[1:])
                m = self.chart.operator_matrix(opname, c)
        self._ops[key] = m
        return m

    def bounds(self, s, f):
        c = self._cell(TriDegree(s, f, 0))
        if self._zero(c):
            return None
        if not self.chart.in_window(TriDegree(c.s, c.f, 0)):
            raise Uncomputed(f"Ext column ({c.s},{c.f}) is outside the window")
        r = self.chart.weight_range(c.s, c.f)
        if r is None:
            return None
        return r[0] - self.shift.w, r[1] - self.shift.w


def _lenient(m, d):
    f = getattr(m, "dim_lenient", None)
    return f(d) if f else m.dim(d)


def _merge_bounds(items):
    lo, hi = None, None
    for b in items:
        if b is None:
            continue
        lo = b[0] if lo is None else min(lo, b[0])
        hi = b[1] if hi is None else max(hi, b[1])
    return None if lo is None else (lo, hi)


class Part(GradedModule):
    """Kernel or cokernel of op^k on a parent, with a cell offset.

    kind 'ker': cell d is ker(op^k) on N_(d+offset).
    kind 'coker': cell d is N_(d+offset) / op^k N_(d+offset-k deg).
    k=None selects the colimit (k -> infinity), with k chosen per cell."""

    def __init__(self, parent: GradedModule, kind: str, opname: str, k, offset: TriDegree,
                 tag: str, name=""):
        if kind not in ("ker", "coker"):
            raise ValueError(kind)
        self.parent = parent
        self.kind = kind
        self.opname = opname
        self.k = k
        self.deg = parent.op_degree(opname)
        self.offset = offset
        self.tag = tag
        self.name = name or f"{kind}({opname}^{k if k else 'inf'})"
        self.unstable = set()
        self._cells = {}
        self._ops = {}
        self._iso = {}
        if k is None:
            self.s_min = NEG_INF if kind == "coker" else parent.s_min - offset.s
            self.f_min = NEG_INF if kind == "coker" else parent.f_min - offset.f
        else:
            self.s_min = parent.s_min - offset.s
            self.f_min = parent.f_min - offset.f

    def op_degree(self, name):
        return self.parent.op_degree(name)

    def has_op(self, name):
        return self.parent.has_op(name)

    # -- colimit index
    def _start(self, c: TriDegree) -> int:
        """First ladder step at which the parent can be nonzero on the diagonal."""
        j0 = 0
        deg = self.deg
        if self.parent.s_min > NEG_INF and deg.s > 0:
            j0 = max(j0, -(-(self.parent.s_min - c.s) // deg.s))
        if self.parent.f_min > NEG_INF and deg.f > 0:
            j0 = max(j0, -(-(self.parent.f_min - c.f) // deg.f))
        return j0

    def _is_iso(self, c: TriDegree) -> bool:
        hit = self._iso.get(c)
        if hit is not None:
            return hit
        n = self.parent.dim(c)
        n2 = self.parent.dim(c + self.deg)
        if n != n2:
            ok = False
        elif n == 0:
            ok = True
        else:
            ok = rank(self.parent.op(self.opname, c)) == n
        self._iso[c] = ok
        return ok

    def _choose_k(self, c: TriDegree) -> int:
        """k for the colimit at parent cell c (ker: on c; coker: target c+k).

        The whole diagonal inside the window is scanned and k is placed after
        the last change; fewer than CONFIRM confirming steps marks c unstable."""
        j0 = self._start(c)
        if self.kind == "ker":
            n = self.parent.dim(c)
            if n == 0:
                return 0
            m = None
            cur = c
            last, prev, j = 0, 0, 0
            while j < MAX_SCAN:
                try:
                    step = self.parent.op(self.opname, cur)
                except Uncomputed:
                    break
                m = step if m is None else compose(step, m)
                j += 1
                cur = cur + self.deg
                kdim = n - rank(m)
                if kdim == n:
                    return j
                if kdim != prev:
                    last = j
                prev = kdim
            if j - max(last, j0) < CONFIRM:
                self.unstable.add(c)
            return last
        last, j = -1, 0
        while j < MAX_SCAN:
            try:
                ok = self._is_iso(c + self.deg.scale(j))
            except Uncomputed:
                break
            if not ok:
                last = j
            j += 1
        k = max(last + 1, 0)
        if j - max(k, j0) < CONFIRM:
            self.unstable.add(c)
        return k

    def _structure(self, d: TriDegree, lenient: bool = False):
        """(k, Subspace | Quotient) at d; unstable cells raise Uncomputed
        unless lenient, so that derived modules never build on them."""
        st = self._cells.get(d)
        if st is None:
            st = self._build(d)
            self._cells[d] = st
        if not lenient and d + self.offset in self.unstable:
            raise Uncomputed(f"cell {d} of {self.name} has not stabilised")
        return st

    def is_unstable(self, d: TriDegree) -> bool:
        self._structure(d, lenient=True)
        return d + self.offset in self.unstable

    def dim_lenient(self, d):
        return len(self._structure(d, lenient=True)[1])

    def _build(self, d: TriDegree):
        c = d + self.offset
        if self.kind == "ker":
            k = self.k if self.k is not None else self._choose_k(c)
            n = self.parent.dim(c)
            if n == 0 or k == 0:
                st = (k, Subspace([]))
            else:
                st = (k, Subspace(kernel(self.parent.op_power(self.opname, k, c))))
        else:
            if self.k is not None:
                k = self.k
                tgt = c
                src = c - self.deg.scale(k)
            else:
                k = self._choose_k(c)
                tgt = c + self.deg.scale(k)
                src = c
            n = self.parent.dim(tgt)
            rel = self.parent.op_power(self.opname, k, src) if n and self.parent.dim(src) else []
            st = (k, Quotient(n, rel))
        return st

    def dim(self, d):
        return len(self._structure(d)[1])

    def _coker_cells(self, d, k):
        c = d + self.offset
        if self.k is not None:
            return c, c - self.deg.scale(k)
        return c + self.deg.scale(k), c

    def op(self, name, d):
        key = (name, d)
        m = self._ops.get(key)
        if m is not None:
            return m
        o = self.op_degree(name)
        d2 = d + o
        k, sp = self._structure(d)
        if len(sp) == 0:
            self._ops[key] = []
            return []
        k2, sp2 = self._structure(d2)
        if len(sp2) == 0:
            m = [0] * len(sp)
            self._ops[key] = m
            return m
        par = self.parent
        if self.kind == "ker":
            c = d + self.offset
            pm = par.op(name, c)
            m = [sp2.coords(apply_matrix(pm, b)) for b in sp.basis]
        else:
            tgt, _ = self._coker_cells(d, k)
            tgt2, src2 = self._coker_cells(d2, k2)
            pm = par.op(name, tgt)
            here = tgt + o  # = representative cell for d2 at the old k
            m = []
            for i in range(len(sp)):
                v = apply_matrix(pm, sp.lift(i))
                if self.k is not None or k2 == k:
                    m.append(sp2.coords(v))
                elif k2 > k:
                    up = par.op_power(self.opname, k2 - k, here)
                    m.append(sp2.coords(apply_matrix(up, v)))
                else:
                    # here = tgt2 + (k - k2) deg; pull back through the iso part
                    down = par.op_power(self.opname, k - k2, tgt2)
                    img = par.op_power(self.opname, k, src2) if par.dim(src2) else []
                    comb = solve_in_span(down + img, v)
                    if comb is None:
                        raise ArithmeticError("colimit representatives are inconsistent")
                    y = comb & ((1 << len(down)) - 1)
                    m.append(sp2.coords(y))
        self._ops[key] = m
        return m

    def bounds(self, s, f):
        c = TriDegree(s, f, 0) + self.offset
        items = []
        if self.k is not None:
            steps = range(self.k + 1)
            base = c - self.deg.scale(self.k) if self.kind == "coker" else c
        else:
            steps = None
            base = c
        j = 0
        while True:
            if steps is not None and j not in steps:
                break
            cell = base + self.deg.scale(j)
            try:
                b = self.parent.bounds(cell.s, cell.f)
            except Uncomputed:
                if steps is not None:
                    raise
                break
            if b is not None:
                shift = cell.w - c.w
                items.append((b[0] - shift - self.offset.w, b[1] - shift - self.offset.w))
            j += 1
            if steps is None and j > 64:
                break
        return _merge_bounds(items)


class SumModule(GradedModule):
    """Direct sum of parts; operators act part by part."""

    def __init__(self, parts: list, name="sum"):
        self.parts = list(parts)
        self.name = name
        self.s_min = min((p.s_min for p in self.parts), default=NEG_INF)
        self.f_min = min((p.f_min for p in self.parts), default=NEG_INF)

    def op_degree(self, name):
        return self.parts[0].op_degree(name)

    def has_op(self, name):
        return all(p.has_op(name) for p in self.parts)

    def dim(self, d):
        return sum(p.dim(d) for p in self.parts)

    def op(self, name, d):
        o = self.op_degree(name)
        d2 = d + o
        out = []
        off2 = 0
        offs2 = []
        for p in self.parts:
            offs2.append(off2)
            off2 += p.dim(d2)
        for p, base in zip(self.parts, offs2):
            for col in p.op(name, d):
                out.append(col << base)
        return out

    def bounds(self, s, f):
        return _merge_bounds(p.bounds(s, f) for p in self.parts)


class ShiftedModule(GradedModule):
    """N shifted: cell d is N_(d + shift)."""

    def __init__(self, parent: GradedModule, shift: TriDegree, name="shift"):
        self.parent = parent
        self.shift = shift
        self.name = name
        self.s_min = parent.s_min - shift.s if parent.s_min > NEG_INF else NEG_INF
        self.f_min = parent.f_min - shift.f if parent.f_min > NEG_INF else NEG_INF

    def op_degree(self, name):
        return self.parent.op_degree(name)

    def has_op(self, name):
        return self.parent.has_op(name)

    def dim(self, d):
        return self.parent.dim(d + self.shift)

    def dim_lenient(self, d):
        return _lenient(self.parent, d + self.shift)

    def is_unstable(self, d):
        f = getattr(self.parent, "is_unstable", None)
        return bool(f and f(d + self.shift))

    def op(self, name, d):
        return self.parent.op(name, d + self.shift)

    def bounds(self, s, f):
        b = self.parent.bounds(s + self.shift.s, f + self.shift.f)
        if b is None:
            return None
        return b[0] - self.shift.w, b[1] - self.shift.w


class ZeroModule(GradedModule):
    name = "0"
    s_min = 0
    f_min = 0

    def dim(self, d):
        return 0

    def op(self, name, d):
        return []

    def bounds(self, s, f):
        return None


# ------------------------------------------------------------- tower charts

@dataclass(frozen=True)
class TowerMarker:
    base: TriDegree          # top cell of the infinite tower (weight of one class)
    direction: str           # 'h0' or 'h1'
    source_tag: str

    def cells(self, n: int = 2) -> list:
        deg = BASE_OPS[self.direction]
        return [self.base - deg.scale(j) for j in range(n)]


@dataclass
class TowerChart:
    name: str
    parts: list                      # [(tag, GradedModule)]
    window: tuple                    # (s_lo, s_hi, f_lo, f_hi)
    markers: list = field(default_factory=list)
    model: GradedModule | None = None   # operator model (defaults to the sum of parts)
    source: object = None

    def __post_init__(self):
        self.sum = SumModule([p for _, p in self.parts], self.name)
        if self.model is None:
            self.model = self.sum
        self._cache = {}
        self._unstable = set()

    # -- cells
    def in_window(self, s, f) -> bool:
        s_lo, s_hi, f_lo, f_hi = self.window
        return s_lo <= s <= s_hi and f_lo <= f <= f_hi

    def column(self, s: int, f: int) -> dict:
        """{w: (ker_part, coker_part)} down to one below the stable floor;
        None if uncomputed."""
        key = (s, f)
        if key in self._cache:
            return self._cache[key]
        try:
            b = self.sum.bounds(s, f)
            out = {}
            if b is not None:
                for w in range(b[1], b[0] - 2, -1):
                    d = TriDegree(s, f, w)
                    k = sum(_lenient(p, d) for tag, p in self.parts if tag == "ker")
                    c = sum(_lenient(p, d) for tag, p in self.parts if tag == "coker")
                    if k or c:
                        out[w] = (k, c)
                    if any(getattr(p, "is_unstable", lambda x: False)(d) for _, p in self.parts):
                        self._unstable.add(d)
                out["floor"] = b[0] - 1
        except Uncomputed:
            out = None
        self._cache[key] = out
        return out

    def dim(self, d: TriDegree):
        col = self.column(d.s, d.f)
        if col is None:
            return None
        if d.w < col.get("floor", d.w):
            d = TriDegree(d.s, d.f, col["floor"])
        k, c = col.get(d.w, (0, 0))
        return k + c

    def parts_at(self, d: TriDegree):
        col = self.column(d.s, d.f)
        if col is None:
            return None
        if d.w < col.get("floor", d.w):
            d = TriDegree(d.s, d.f, col["floor"])
        return col.get(d.w, (0, 0))

    def stable_dim(self, s: int, f: int):
        col = self.column(s, f)
        if col is None:
            return None
        if "floor" not in col:
            return 0
        k, c = col.get(col["floor"], (0, 0))
        return k + c

    def cells(self):
        """[(TriDegree, ker, coker)] for every nonzero cell in the window down
        to the stable floor."""
        s_lo, s_hi, f_lo, f_hi = self.window
        out = []
        for s in range(s_lo, s_hi + 1):
            for f in range(f_lo, f_hi + 1):
                col = self.column(s, f)
                if not col:
                    continue
                for w in sorted((x for x in col if x != "floor"), reverse=True):
                    k, c = col[w]
                    out.append((TriDegree(s, f, w), k, c))
        return out

    def uncomputed(self):
        s_lo, s_hi, f_lo, f_hi = self.window
        return [(s, f) for s in range(s_lo, s_hi + 1) for f in range(f_lo, f_hi + 1)
                if self.column(s, f) is None]

    def unstable(self) -> list:
        """Window cells whose colimit had not settled inside the source window."""
        self.cells()
        return sorted(self._unstable)

    def dots(self) -> set:
        """(s, f) positions carrying a tau-free summand."""
        s_lo, s_hi, f_lo, f_hi = self.window
        return {(s, f) for s in range(s_lo, s_hi + 1) for f in range(f_lo, f_hi + 1)
                if self.stable_dim(s, f)}

    def figure_dots(self) -> set:
        """Dots plus the first two cells of every tower marker."""
        out = self.dots()
        for m in self.markers:
            for c in m.cells(2):
                if self.in_window(c.s, c.f):
                    out.add((c.s, c.f))
        return out

    def nonzero_positions(self) -> set:
        return {(d.s, d.f) for d, k, c in self.cells() if k + c}

    def lines(self, opname: str) -> set:
        """Pairs ((s,f),(s',f')) with the operator nonzero between the cells at
        some weight; computed on the operator model."""
        out = set()
        deg = self.model.op_degree(opname)
        for d, k, c in self.cells():
            d2 = d + deg
            try:
                m = self.model.op(opname, d)
            except Uncomputed:
                continue
            if any(m):
                out.add(((d.s, d.f), (d2.s, d2.f)))
        return out

    def tsv_rows(self):
        rows = []
        marks = {}
        for m in self.markers:
            marks.setdefault((m.base.s, m.base.f), []).append(m.direction)
        for d, k, c in sorted(self.cells(), key=lambda x: (x[0].s, x[0].f, -x[0].w)):
            tm = ",".join(marks.get((d.s, d.f), [])) or "-"
            rows.append((d.s, d.f, d.w, k + c, k, c, tm))
        return rows


def _chart_module(x) -> GradedModule:
    if isinstance(x, TowerChart):
        return x.model
    if isinstance(x, GradedModule):
        return x
    return ExtModule(x)


def _window_of(x, default=(-16, 40, -8, 40)):
    if isinstance(x, TowerChart):
        return x.window
    chart = getattr(x, "chart", x)
    if hasattr(chart, "t_max"):
        return (-2, chart.t_max, -1, chart.f_max - 1)
    return default


def _find_markers(part: Part, out_shift: TriDegree, window, tag: str) -> list:
    """Negative towers of a localisation quotient N[h^-1]/N.

    Every class of the quotient is infinitely h-divisible, so each class
    killed by h is the top of an infinite tower; such tops are the markers.
    As a sanity check the tower must stay nonzero down to the window edge."""
    s_lo, s_hi, f_lo, f_hi = window
    deg = part.deg
    name = _opname_of(deg)
    markers = []
    seen = set()
    for s in range(s_lo, s_hi + 1):
        for f in range(f_lo, f_hi + 1):
            try:
                b = part.bounds(s, f)
            except Uncomputed:
                continue
            if b is None:
                continue
            for w in range(b[1], b[0] - 2, -1):
                d = TriDegree(s, f, w)
                try:
                    n = part.dim(d)
                    if not n or rank(part.op(name, d)) == n:
                        continue
                    cur = d - deg
                    ok = True
                    while s_lo <= cur.s and f_lo <= cur.f:
                        if not _lenient(part, cur):
                            ok = False
                            break
                        cur = cur - deg
                except Uncomputed:
                    continue
                base = d - out_shift
                if not ok or (base.s, base.f) in seen:
                    continue
                seen.add((base.s, base.f))
                markers.append(TowerMarker(base, name, tag))
    return markers


def _opname_of(deg: TriDegree) -> str:
    for k, v in BASE_OPS.items():
        if v == deg:
            return k
    return str(deg)


def _carry_markers(markers, part_shift: TriDegree, part: GradedModule, window) -> list:
    """Markers of N surviving into a part whose cell d reads N at d + shift:
    kept when the part is nonzero at the marker's first two cells."""
    out = []
    for m in markers:
        ok = True
        for c in m.cells(2):
            d = c - part_shift
            try:
                if not _lenient(part, d):
                    ok = False
            except Uncomputed:
                ok = False
        if ok:
            out.append(TowerMarker(m.base - part_shift, m.direction, m.source_tag))
    return out


# ------------------------------------------------------------- operations

def f0_groups(chart, window=None) -> TowerChart:
    """[S, F0]: h0-power torsion of Ext plus the negative h0-tower.

    [S,F0]_(s,f,w) = h0-torsion(Ext)_(s,f,w) + (Ext[h0^-1]/Ext)_(s+1,f-1,w)."""
    N = _chart_module(chart)
    window = window or _window_of(chart)
    tors = Part(N, "ker", "h0", None, TriDegree(0, 0, 0), "ker", "h0-torsion")
    loc = Part(N, "coker", "h0", None, TriDegree(1, -1, 0), "coker", "Ext[h0^-1]/Ext")
    tc = TowerChart("F0", [("ker", tors), ("coker", loc)], window, source=chart)
    tc.markers = _find_markers(loc, TriDegree(0, 0, 0), window, "coker")
    return tc


def f01_groups(f0: TowerChart, window=None) -> TowerChart:
    """[S, F01]: h1-power torsion of F0 plus negative h1-towers.

    [S,F01]_(s,f,w) = h1-torsion(F0)_(s,f,w) + (F0[h1^-1]/F0)_(s+1,f-1,w)."""
    N = f0.model
    window = window or f0.window
    tors = Part(N, "ker", "h1", None, TriDegree(0, 0, 0), "ker", "h1-torsion")
    loc = Part(N, "coker", "h1", None, TriDegree(1, -1, 0), "coker", "F0[h1^-1]/F0")
    tc = TowerChart("F01", [("ker", tors), ("coker", loc)], window, source=f0)
    tc.markers = (_carry_markers(f0.markers, TriDegree(0, 0, 0), tors, window)
                  + _find_markers(loc, TriDegree(0, 0, 0), window, "coker"))
    return tc


def mod_h1_infty(tc, window=None, suspension: TriDegree = TriDegree(-1, 1, 0),
                 k_max: int = 48) -> TowerChart:
    """[S, Sigma^suspension N/h1^inf] as the colimit of the ker/coker ladder.

    Stage k: [S, Sigma^{-k} N/h1^k] has a cokernel part coker(h1^k) and a
    kernel part ker(h1^k); the stage maps are the canonical ones, and a cell
    is taken from the first stage after which its dimension stays constant
    for two more stages.  Cells that never settle are marked unstable."""
    N = _chart_module(tc)
    window = window or _window_of(tc)
    # with the default suspension, ker part at (s,f,w), coker part at (s+1,f-1,w)
    off_coker = TriDegree(0, 0, 0) - suspension
    off_ker = off_coker + TriDegree(-1, 1, 0)
    ker = _LadderPart(N, "ker", off_ker, k_max)
    coker = _LadderPart(N, "coker", off_coker, k_max)
    out = TowerChart("N/h1^inf", [("ker", ker), ("coker", coker)], window, source=tc)
    out.markers = _find_markers(coker, TriDegree(0, 0, 0), window, "coker")
    return out


class _LadderPart(Part):
    """Colimit over k of ker(h1^k) or coker(h1^k), k chosen from stage dims."""

    def __init__(self, parent, kind, offset, k_max):
        super().__init__(parent, kind, "h1", None, offset, kind, f"ladder-{kind}")
        self.k_max = k_max

    def _choose_k(self, c):
        """First stage after which this part's stage dimension no longer
        changes anywhere inside the window."""
        j0 = self._start(c)
        last, prev, k = 0, 0, 1
        while k <= self.k_max:
            try:
                dk = self._stage(c, k)
            except Uncomputed:
                break
            if dk != prev:
                last = k
            prev = dk
            k += 1
        if k - 1 - max(last, j0) < CONFIRM:
            self.unstable.add(c)
        return last

    def _stage(self, c, k):
        if self.kind == "ker":
            n = self.parent.dim(c)
            return n - rank(self.parent.op_power("h1", k, c)) if n else 0
        tgt = c + self.deg.scale(k)
        n = self.parent.dim(tgt)
        return n - (rank(self.parent.op_power("h1", k, c)) if n and self.parent.dim(c) else 0)

    def stage_dim(self, d: TriDegree, k: int) -> int:
        return self._stage(d + self.offset, k) if k else 0


def ladder_stage_dims(tc: TowerChart, d: TriDegree, k_values) -> list:
    """Dimensions of the stage-k groups at cell d (mod_h1_infty output)."""
    out = []
    for k in k_values:
        total = 0
        for tag, p in tc.parts:
            total += p.stage_dim(d, k)
        out.append(total)
    return out


def smash_h0k_groups(N, k: int, window=None, model: GradedModule | None = None) -> TowerChart:
    """[S/h0^k, N]_(s,f,w) = coker(h0^k)_(s+1,f+k-1,w) + ker(h0^k)_(s,f,w)."""
    if k <= 0:
        raise ValueError("k must be positive")
    return theta_cofiber_groups(N, "h0", window=window, power=k, model=model,
                                name=f"[S/h0^{k},N]")


def theta_cofiber_groups(N, theta: str, window=None, power: int = 1,
                         model: GradedModule | None = None, name=None) -> TowerChart:
    """[S/theta, N]_(s,f,w) = coker(theta)_(s+1+s0, f-1+f0, w+w0) + ker(theta)_(s,f,w)
    for theta = op^power of degree (s0, f0, w0)."""
    M = _chart_module(N)
    window = window or _window_of(N)
    if not M.has_op(theta):
        raise ValueError(f"operator {theta} is not defined on this module")
    d0 = M.op_degree(theta).scale(power)
    ker = Part(M, "ker", theta, power, TriDegree(0, 0, 0), "ker", f"ker({theta}^{power})")
    coker = Part(M, "coker", theta, power, TriDegree(1, -1, 0) + d0, "coker",
                 f"coker({theta}^{power})")
    tc = TowerChart(name or f"[S/{theta},N]", [("ker", ker), ("coker", coker)], window,
                    source=N)
    if model is not None:
        tc.model = model
    src_markers = N.markers if isinstance(N, TowerChart) else []
    tc.markers = (_carry_markers(src_markers, TriDegree(0, 0, 0), ker, window)
                  + _carry_markers(src_markers, coker.offset, coker, window))
    return tc


def cofiber_h0_model(sphere_chart, cofiber_chart, with_P: bool = False) -> ExtModule:
    """Operator model for [S/h0, S]: Ext of the two-cell comodule, desuspended
    one stem.  It carries the multiplicative extensions that the ker/coker
    split leaves open (for example h0 times the h1 on the bottom cell).

    with_P adds the operator P, acting through the Yoneda action of the
    (8,4,4) class of the sphere chart."""
    from .resolve.products import module_product
    from .trigrade import P as P_DEG
    extra = {}
    if with_P:
        p_class = sphere_chart.unique_class(P_DEG)

        def act(x):
            return module_product(sphere_chart, p_class, cofiber_chart, x)
        extra["P"] = (P_DEG, act)
    return ExtModule(cofiber_chart, TriDegree(1, 0, 0), extra, name="Ext(Ch0)")


def attach_model(tc: TowerChart, model: GradedModule) -> list:
    """Use model for operators on tc after checking that it has the same
    dimension at every cell of the window; returns the mismatches (and
    attaches nothing if there are any)."""
    bad = []
    s_lo, s_hi, f_lo, f_hi = tc.window
    for s in range(s_lo, s_hi + 1):
        for f in range(f_lo, f_hi + 1):
            col = tc.column(s, f)
            if col is None:
                continue
            try:
                b = _merge_bounds([model.bounds(s, f), tc.sum.bounds(s, f)])
            except Uncomputed:
                continue
            if b is None:
                continue
            for w in range(b[1], b[0] - 2, -1):
                d = TriDegree(s, f, w)
                try:
                    m = model.dim(d)
                except Uncomputed:
                    continue
                if m != tc.dim(d):
                    bad.append((d, tc.dim(d), m))
    if not bad:
        tc.model = model
    return bad


def suspend(tc: TowerChart, d: TriDegree) -> TowerChart:
    """Sigma^d: cell (s,f,w) of the result is cell (s,f,w) - d of tc."""
    parts = [(tag, ShiftedModule(p, TriDegree(0, 0, 0) - d)) for tag, p in tc.parts]
    s_lo, s_hi, f_lo, f_hi = tc.window
    out = TowerChart(f"Sigma{d}{tc.name}", parts, (s_lo + d.s, s_hi + d.s, f_lo + d.f, f_hi + d.f),
                     model=ShiftedModule(tc.model, TriDegree(0, 0, 0) - d), source=tc)
    out.markers = [TowerMarker(m.base + d, m.direction, m.source_tag) for m in tc.markers]
    return out


def h1_torsion_certify(chart, x, plane=None) -> str:
    """'torsion' if some h1-power of x vanishes in the window, 'tower' if the
    powers stay nonzero up to a cell strictly above f = s/2 + 3/2 with s > 0,
    'unknown' if the window runs out first."""
    from .trigrade import Plane, strictly_above
    from fractions import Fraction
    plane = plane or Plane(Fraction(1, 2), 0, Fraction(3, 2))
    y = x
    while True:
        if y.is_zero():
            return "torsion"
        d = y.degree
        if d.s > 0 and strictly_above(d, plane):
            return "tower"
        d2 = d + H1
        if not chart.in_window(d2):
            return "unknown"
        y = chart.multiply_h(1, y)


def cofiber_restriction(tc: TowerChart):
    """The map [S/theta, N] -> [S, N] induced by the bottom cell: the inclusion
    on the kernel part and zero on the cokernel part.  Returns (degree, fn)
    with fn(d) the matrix into the cell d of the parent module."""
    ker = next(p for tag, p in tc.parts if tag == "ker")

    def fn(d):
        sub = ker._structure(d)[1]
        n_coker = sum(p.dim(d) for tag, p in tc.parts if tag != "ker")
        return list(sub.basis) + [0] * n_coker
    return TriDegree(0, 0, 0), fn
