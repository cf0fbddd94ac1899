"""Exact linear algebra over the graded ring F2[tau].

Everything here lives in weight-graded free F2[tau]-modules where tau raises
the module weight by one.  A homogeneous element of weight w is stored as a
bitset over basis elements b with weight(b) <= w; basis element b carries the
coefficient tau^(w - weight(b)).  So a homogeneous matrix is just an F2 bit
pattern: the exponents are forced by the weights.

Callers working in the Ext grading, where tau lowers weight, pass negated
weights.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .trigrade import TriDegree, ZERO

EXPONENT_BOUND = 256


def bits_of(v: int):
    """Indices of set bits, low to high."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True)
class GradedFreeModule:
    generators: tuple

    def __init__(self, generators: Iterable):
        gens = tuple((str(n), d) for n, d in generators)
        names = [n for n, _ in gens]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        object.__setattr__(self, "generators", gens)

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def weights(self) -> list:
        return [d.w for _, d in self.generators]

    @property
    def degrees(self) -> list:
        return [d for _, d in self.generators]

    def permuted(self, order) -> "GradedFreeModule":
        return GradedFreeModule([self.generators[i] for i in order])

    @classmethod
    def from_weights(cls, weights, t=0, prefix="e"):
        return cls((f"{prefix}{i}", TriDegree(t, 0, w)) for i, w in enumerate(weights))


@dataclass(frozen=True)
class TauVector:
    """Homogeneous element: support bitset plus its weight."""

    bits: int
    weight: int


def element(module: GradedFreeModule, coeffs: dict) -> TauVector:
    """Build an element from {index: tau-exponent}; exponents must agree."""
    if not coeffs:
        raise ValueError("use TauVector(0, w) for a zero element")
    ws = module.weights
    weights = {ws[i] + e for i, e in coeffs.items()}
    if len(weights) != 1 or min(coeffs.values()) < 0:
        raise ValueError("inhomogeneous element")
    bits = 0
    for i in coeffs:
        bits |= 1 << i
    return TauVector(bits, weights.pop())


def coefficients(module: GradedFreeModule, v: TauVector) -> dict:
    ws = module.weights
    return {i: v.weight - ws[i] for i in bits_of(v.bits)}


class TauMatrix:
    """Homogeneous map of free F2[tau]-modules.

    columns[j] is the bitset of codomain rows where column j is nonzero; the
    entry at (i, j) is tau^e with e = w(dom_j) + shift.w - w(cod_i).
    """

    def __init__(self, domain: GradedFreeModule, codomain: GradedFreeModule,
                 columns, shift: TriDegree = ZERO, bound: int = EXPONENT_BOUND):
        self.domain = domain
        self.codomain = codomain
        self.columns = list(columns)
        self.shift = shift
        if len(self.columns) != domain.rank:
            raise ValueError("column count does not match domain rank")
        cd = codomain.degrees
        for j, col in enumerate(self.columns):
            if col >> codomain.rank:
                raise ValueError(f"column {j} has rows outside the codomain")
            dj = domain.generators[j][1]
            for i in bits_of(col):
                e = dj.w + shift.w - cd[i].w
                if e < 0:
                    raise ValueError(f"entry ({i},{j}) would need tau^{e}")
                if e > bound:
                    raise ValueError(f"entry ({i},{j}) exponent {e} exceeds bound {bound}")
                if cd[i].t != dj.t + shift.t:
                    raise ValueError(f"entry ({i},{j}) is not degree-homogeneous")

    @classmethod
    def from_entries(cls, domain, codomain, entries: dict, shift=ZERO):
        """entries: {(row, col): exponent}; exponents are checked against weights."""
        cols = [0] * domain.rank
        for (i, j), e in entries.items():
            forced = domain.generators[j][1].w + shift.w - codomain.generators[i][1].w
            if e != forced:
                raise ValueError(f"entry ({i},{j}) has exponent {e}, weights force {forced}")
            cols[j] |= 1 << i
        return cls(domain, codomain, cols, shift)

    @property
    def entries(self) -> dict:
        cd = self.codomain.degrees
        out = {}
        for j, col in enumerate(self.columns):
            wj = self.domain.generators[j][1].w + self.shift.w
            for i in bits_of(col):
                out[(i, j)] = wj - cd[i].w
        return out

    @property
    def shape(self):
        return self.codomain.rank, self.domain.rank

    def __matmul__(self, other: "TauMatrix") -> "TauMatrix":
        if other.codomain != self.domain:
            raise ValueError("incompatible composition")
        cols = []
        for col in other.columns:
            acc = 0
            for k in bits_of(col):
                acc ^= self.columns[k]
            cols.append(acc)
        return TauMatrix(other.domain, self.codomain, cols, self.shift + other.shift)

    def __eq__(self, other) -> bool:
        return (isinstance(other, TauMatrix) and self.domain == other.domain
                and self.codomain == other.codomain and self.columns == other.columns
                and self.shift == other.shift)

    def apply(self, v: TauVector) -> TauVector:
        acc = 0
        for j in bits_of(v.bits):
            acc ^= self.columns[j]
        return TauVector(acc, v.weight + self.shift.w)

    def rows(self) -> list:
        r = [0] * self.codomain.rank
        for j, col in enumerate(self.columns):
            for i in bits_of(col):
                r[i] |= 1 << j
        return r

    def is_zero(self) -> bool:
        return not any(self.columns)


def identity(module: GradedFreeModule) -> TauMatrix:
    return TauMatrix(module, module, [1 << i for i in range(module.rank)])


def reduce_vector(v: int, pivots: dict, comb: int = 0):
    """Reduce v against pivots {leading bit: (vec, comb)}."""
    while v:
        lb = v.bit_length() - 1
        p = pivots.get(lb)
        if p is None:
            break
        v ^= p[0]
        comb ^= p[1]
    return v, comb


def filtered_kernel(columns, weights):
    """Kernel of an F2 matrix filtered by column weight.

    Columns are processed in increasing (weight, index).  Returns
    (kernel, pivots) where kernel is a list of (combination bitset, weight)
    forming a free F2[tau]-basis of the kernel, and pivots maps leading bits
    of the reduced image to (vector, combination, weight).
    """
    order = sorted(range(len(columns)), key=lambda j: (weights[j], j))
    piv = {}
    kernel = []
    for j in order:
        v = columns[j]
        comb = 1 << j
        while v:
            lb = v.bit_length() - 1
            p = piv.get(lb)
            if p is None:
                piv[lb] = (v, comb, weights[j])
                break
            v ^= p[0]
            comb ^= p[1]
        else:
            kernel.append((comb, weights[j]))
    return kernel, piv


def snf(m: TauMatrix):
    """Smith normal form over F2[tau].

    Returns (U, diagonal, V) with U @ m @ V diagonal, diagonal entries
    tau^e for e in the nondecreasing list `diagonal`.  U maps the codomain to
    a reordering of it, V maps a reordering of the domain to the domain.
    """
    nr, nc = m.shape
    wc = m.codomain.weights
    wd = [d.w + m.shift.w for d in m.domain.degrees]
    rows = m.rows()
    U = [1 << i for i in range(nr)]      # new row i = sum of old rows in U[i]
    V = [1 << j for j in range(nc)]      # new col j = sum of old cols in V[j]
    active_r = set(range(nr))
    active_c = set(range(nc))
    pivots = []
    while True:
        best = None
        for i in sorted(active_r):
            r = rows[i]
            for j in bits_of(r):
                if j not in active_c:
                    continue
                key = (wd[j] - wc[i], i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        e, pi, pj = best
        # clear column pj from other rows
        for i in range(nr):
            if i != pi and (rows[i] >> pj) & 1:
                rows[i] ^= rows[pi]
                U[i] ^= U[pi]
        # clear row pi from other columns
        r = rows[pi]
        for j in list(bits_of(r)):
            if j == pj:
                continue
            for i in range(nr):
                if (rows[i] >> pj) & 1:
                    rows[i] ^= 1 << j
            V[j] ^= V[pj]
        pivots.append((pi, pj, e))
        active_r.discard(pi)
        active_c.discard(pj)
    prow = [p[0] for p in pivots] + [i for i in range(nr) if i not in {p[0] for p in pivots}]
    pcol = [p[1] for p in pivots] + [j for j in range(nc) if j not in {p[1] for p in pivots}]
    cod_p = m.codomain.permuted(prow)
    dom_p = m.domain.permuted(pcol)
    ucols = [0] * nr
    for k, i in enumerate(prow):
        for src in bits_of(U[i]):
            ucols[src] |= 1 << k
    Um = TauMatrix(m.codomain, cod_p, ucols)
    Vm = TauMatrix(dom_p, m.domain, [V[j] for j in pcol])
    return Um, [p[2] for p in pivots], Vm


def snf_diagonal(m: TauMatrix, U: TauMatrix, diag, V: TauMatrix) -> TauMatrix:
    """The diagonal matrix U @ m @ V should equal."""
    cols = [(1 << k) if k < len(diag) else 0 for k in range(V.domain.rank)]
    return TauMatrix(V.domain, U.codomain, cols, m.shift)


def kernel_basis(m: TauMatrix):
    kernel, _ = filtered_kernel(m.columns, [d.w for d in m.domain.degrees])
    gens = []
    for n, (comb, w) in enumerate(kernel):
        lead = comb.bit_length() - 1
        d = m.domain.generators[lead][1]
        gens.append((f"k{n}", TriDegree(d.s, d.f, w)))
    K = GradedFreeModule(gens)
    return K, TauMatrix(K, m.domain, [c for c, _ in kernel])


@dataclass
class Decomposition:
    free: list = field(default_factory=list)       # TriDegree
    torsion: list = field(default_factory=list)    # (TriDegree, order)


def cokernel(m: TauMatrix) -> Decomposition:
    U, diag, V = snf(m)
    out = Decomposition()
    cod = U.codomain.degrees
    for k, d in enumerate(cod):
        if k < len(diag):
            if diag[k] > 0:
                out.torsion.append((d, diag[k]))
        else:
            out.free.append(d)
    return out


def solve(m: TauMatrix, target) -> TauVector | None:
    """Find x with m x = target, or None.

    target is a TauVector or {row: exponent}.  The solution uses only
    columns whose weight allows a nonnegative tau power; the choice is
    deterministic (lowest column indices win).
    """
    if isinstance(target, dict):
        target = element(m.codomain, target)
    wc = m.codomain.weights
    for i in bits_of(target.bits):
        if wc[i] > target.weight:
            raise ValueError(f"target is not homogeneous of weight {target.weight} at row {i}")
    xw = target.weight - m.shift.w
    piv = {}
    for j, col in enumerate(m.columns):
        if m.domain.generators[j][1].w > xw:
            continue
        v, comb = reduce_vector(col, piv, 1 << j)
        if v:
            piv[v.bit_length() - 1] = (v, comb)
    v, comb = reduce_vector(target.bits, piv)
    if v:
        return None
    return TauVector(comb, xw)


class FilteredHomology:
    """Homology of C_prev --d_in--> C_mid --d_out--> C_next as an F2[tau]-module.

    All maps are homogeneous bit patterns; u_* are module weights (tau
    raises them).  The result is a list of summands (birth weight, order)
    with order None for a free summand, plus a representative cycle per
    summand.  Torsion order is death - birth.
    """

    def __init__(self, u_mid, d_out_cols, u_in, d_in_cols):
        self.u_mid = list(u_mid)
        kernel, _ = filtered_kernel(d_out_cols, self.u_mid)
        # order kernel generators by (weight, index) so the highest bit is the youngest
        kernel.sort(key=lambda kw: (kw[1], kw[0].bit_length()))
        self.kernel = kernel
        self.kpiv = {}
        for l, (vec, _) in enumerate(kernel):
            v, comb = reduce_vector(vec, self.kpiv, 1 << l)
            assert v, "kernel basis must be independent"
            self.kpiv[v.bit_length() - 1] = (v, comb)
        lows = {}
        order = sorted(range(len(d_in_cols)), key=lambda j: (u_in[j], j))
        for j in order:
            col = d_in_cols[j]
            if not col:
                continue
            v, coords = reduce_vector(col, self.kpiv)
            if v:
                raise ValueError("d_out o d_in != 0")
            while coords:
                low = coords.bit_length() - 1
                p = lows.get(low)
                if p is None:
                    lows[low] = (coords, u_in[j])
                    break
                coords ^= p[0]
        self.lows = lows
        self.summands = []
        for l, (vec, u) in enumerate(kernel):
            if l in lows:
                death = lows[l][1]
                if death > u:
                    self.summands.append((l, u, death - u))
            else:
                self.summands.append((l, u, None))

    def rank_at(self, u: int) -> int:
        n = 0
        for _, b, k in self.summands:
            if b <= u and (k is None or u < b + k):
                n += 1
        return n

    def basis_at(self, u: int) -> list:
        """Kernel indices forming a basis of H at weight u."""
        return [l for l, b, k in self.summands if b <= u and (k is None or u < b + k)]

    def coordinates(self, cycle: int, u: int):
        """Coordinates of a cycle of weight u in basis_at(u), as a bitset over
        that list; None if it is not a cycle."""
        v, coords = reduce_vector(cycle, self.kpiv)
        if v:
            return None
        basis = self.basis_at(u)
        pos = {l: n for n, l in enumerate(basis)}
        out = 0
        while coords:
            low = coords.bit_length() - 1
            p = self.lows.get(low)
            if p is not None and p[1] <= u:
                coords ^= p[0]
                continue
            if low not in pos:
                # a generator already tau-killed at this weight or born later
                raise ValueError("cycle has a component outside the weight window")
            out |= 1 << pos[low]
            coords ^= 1 << low
        return out

    def representative(self, l: int) -> int:
        return self.kernel[l][0]
