"""The C-motivic dual Steenrod algebra, its quotient Hopf algebras, and comodules.

A monomial tau_0^e0 tau_1^e1 ... xi_1^r1 xi_2^r2 ... is stored as two
exponent tuples.  Products are put in normal form with tau_i^2 = tau*xi_{i+1};
the ground ring is F2[tau] and tau-powers are carried as separate integer
exponents.  tau has weight -1 on this (homology) side.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iproduct

from .trigrade import TriDegree


@dataclass(frozen=True, order=True)
class Monomial:
    eps: tuple = ()
    xi: tuple = ()   # xi[0] is the exponent of xi_1

    def __post_init__(self):
        eps = tuple(self.eps)
        xi = tuple(self.xi)
        while eps and eps[-1] == 0:
            eps = eps[:-1]
        while xi and xi[-1] == 0:
            xi = xi[:-1]
        if any(e not in (0, 1) for e in eps) or any(r < 0 for r in xi):
            raise ValueError("bad monomial exponents")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "xi", xi)

    @property
    def t(self) -> int:
        return (sum(e * (2 ** (i + 1) - 1) for i, e in enumerate(self.eps))
                + sum(r * (2 ** (i + 2) - 2) for i, r in enumerate(self.xi)))

    @property
    def w(self) -> int:
        return (sum(e * (2 ** i - 1) for i, e in enumerate(self.eps))
                + sum(r * (2 ** (i + 1) - 1) for i, r in enumerate(self.xi)))

    @property
    def degree(self) -> TriDegree:
        return TriDegree(self.t, 0, self.w)

    def is_unit(self) -> bool:
        return not self.eps and not self.xi

    def __str__(self) -> str:
        parts = [f"tau{i}" for i, e in enumerate(self.eps) if e]
        for i, r in enumerate(self.xi):
            if r == 1:
                parts.append(f"xi{i + 1}")
            elif r > 1:
                parts.append(f"xi{i + 1}^{r}")
        return "*".join(parts) if parts else "1"

    def __repr__(self) -> str:
        return f"Monomial({self})"


ONE = Monomial()


def tau_gen(i: int) -> Monomial:
    return Monomial((0,) * i + (1,), ())


def xi_gen(i: int, power: int = 1) -> Monomial:
    return Monomial((), (0,) * (i - 1) + (power,))


_FACTOR = re.compile(r"^(tau|xi)(\d+)(?:\^(\d+))?$")


def parse_monomial(text: str) -> Monomial:
    text = text.strip()
    if text == "1":
        return ONE
    eps: dict = {}
    xi: dict = {}
    for tok in re.split(r"[*\s]+", text):
        if not tok:
            continue
        m = _FACTOR.match(tok)
        if not m:
            raise ValueError(f"bad monomial factor {tok!r}")
        kind, idx, pw = m.group(1), int(m.group(2)), int(m.group(3) or 1)
        if kind == "tau":
            if pw != 1 or eps.get(idx):
                raise ValueError(f"tau{idx} squared is not a normal-form monomial")
            eps[idx] = 1
        else:
            if idx < 1:
                raise ValueError("xi indices start at 1")
            xi[idx] = xi.get(idx, 0) + pw
    e = tuple(eps.get(i, 0) for i in range(max(eps, default=-1) + 1))
    x = tuple(xi.get(i, 0) for i in range(1, max(xi, default=0) + 1))
    return Monomial(e, x)


@dataclass(frozen=True)
class HopfPresentation:
    """n_tau: number of tau generators (None: all).  xi_bounds[i-1] is the
    first vanishing power of xi_i (None: unbounded); xi_i past the tuple are
    killed.  xi_bounds=None means every xi_i is present and unbounded."""

    name: str
    n_tau: int | None
    xi_bounds: tuple | None

    def has_tau(self, i: int) -> bool:
        return self.n_tau is None or i < self.n_tau

    def xi_bound(self, i: int):
        if self.xi_bounds is None:
            return None
        if i - 1 < len(self.xi_bounds):
            return self.xi_bounds[i - 1]
        return 1

    @property
    def finite(self) -> bool:
        return self.n_tau is not None and self.xi_bounds is not None and None not in self.xi_bounds

    def valid(self, m: Monomial) -> bool:
        for i, e in enumerate(m.eps):
            if e and not self.has_tau(i):
                return False
        for i, r in enumerate(m.xi):
            b = self.xi_bound(i + 1)
            if b is not None and r >= b:
                return False
        return True

    def top_degree(self):
        if not self.finite:
            return None
        t = sum(2 ** (i + 1) - 1 for i in range(self.n_tau))
        t += sum((b - 1) * (2 ** (i + 2) - 2) for i, b in enumerate(self.xi_bounds))
        return t


A = HopfPresentation("A", None, None)
A1 = HopfPresentation("A1", 2, (2,))
A2 = HopfPresentation("A2", 3, (4, 2))
A2_MOD_XI1SQ = HopfPresentation("A2/xi1sq", 3, (2, 2))
A2_MOD_XI1SQ_XI2 = HopfPresentation("A2/(xi1sq,xi2)", 3, (2, 1))

PRESENTATIONS = {
    "A": A, "A1": A1, "A2": A2,
    "A2-mod-xi1sq": A2_MOD_XI1SQ, "A2/xi1sq": A2_MOD_XI1SQ,
    "A2-mod-xi1sq-xi2": A2_MOD_XI1SQ_XI2, "A2/(xi1sq,xi2)": A2_MOD_XI1SQ_XI2,
}


def multiply(p: HopfPresentation, m1: Monomial, m2: Monomial):
    """Normal form of m1*m2 as (tau exponent, monomial), or None if zero."""
    n = max(len(m1.eps), len(m2.eps))
    e1 = m1.eps + (0,) * (n - len(m1.eps))
    e2 = m2.eps + (0,) * (n - len(m2.eps))
    nx = max(len(m1.xi), len(m2.xi), n)
    xi = [0] * nx
    for i, r in enumerate(m1.xi):
        xi[i] += r
    for i, r in enumerate(m2.xi):
        xi[i] += r
    eps = []
    k = 0
    for i in range(n):
        if e1[i] and e2[i]:
            # tau_i^2 = tau * xi_{i+1}
            xi[i] += 1
            k += 1
            eps.append(0)
        else:
            eps.append(e1[i] | e2[i])
    m = Monomial(tuple(eps), tuple(xi))
    if not p.valid(m):
        return None
    return k, m


def _gens_up_to(p: HopfPresentation, t: int):
    taus = []
    i = 0
    while 2 ** (i + 1) - 1 <= t:
        if p.has_tau(i):
            taus.append(i)
        i += 1
    xis = []
    i = 1
    while 2 ** (i + 1) - 2 <= t:
        b = p.xi_bound(i)
        if b is None or b > 1:
            xis.append((i, b))
        i += 1
    return taus, xis


@lru_cache(maxsize=None)
def _basis_by_degree(p: HopfPresentation, t_max: int):
    taus, xis = _gens_up_to(p, t_max)
    out = {t: [] for t in range(t_max + 1)}

    def rec_xi(k, t, xi):
        if k == len(xis):
            yield t, xi
            return
        i, b = xis[k]
        step = 2 ** (i + 1) - 2
        r = 0
        while t + r * step <= t_max and (b is None or r < b):
            yield from rec_xi(k + 1, t + r * step, xi + [(i, r)])
            r += 1

    for eps_bits in iproduct((0, 1), repeat=len(taus)):
        te = sum(2 ** (i + 1) - 1 for i, e in zip(taus, eps_bits) if e)
        if te > t_max:
            continue
        n = (max(taus) + 1) if taus else 0
        eps = [0] * n
        for i, e in zip(taus, eps_bits):
            eps[i] = e
        for t, xi in rec_xi(0, te, []):
            xv = [0] * (max((i for i, _ in xi), default=0))
            for i, r in xi:
                xv[i - 1] = r
            out[t].append(Monomial(tuple(eps), tuple(xv)))
    for t in out:
        out[t].sort(key=lambda m: (-m.w, m.eps, m.xi))
    return out


def monomial_basis(p: HopfPresentation, t: int) -> list:
    """M2-basis monomials of internal degree t, weight descending then
    lexicographic in the exponent vectors."""
    if t < 0:
        return []
    return list(_basis_by_degree(p, t)[t])


class Tensor:
    """Formal sum in A^v (x) A^v: {(m1, m2): tau exponent}, F2 coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = dict(terms or {})

    def add(self, key, k):
        old = self.terms.pop(key, None)
        if old is None:
            self.terms[key] = k
        elif old != k:
            raise AssertionError("inhomogeneous tensor sum")

    def __eq__(self, other):
        return self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())


def _tensor_mul(p, x: Tensor, y: Tensor) -> Tensor:
    out = Tensor()
    for (a1, b1), k1 in x:
        for (a2, b2), k2 in y:
            pa = multiply(p, a1, a2)
            if pa is None:
                continue
            pb = multiply(p, b1, b2)
            if pb is None:
                continue
            out.add((pa[1], pb[1]), k1 + k2 + pa[0] + pb[0])
    return out


def _gen_coproduct(p: HopfPresentation, kind: str, n: int) -> Tensor:
    out = Tensor()
    if kind == "tau":
        out.add((tau_gen(n), ONE), 0)
    for i in range(n + 1):
        j = n - i
        left = ONE if j == 0 else xi_gen(j, 2 ** i)
        if kind == "xi":
            right = ONE if i == 0 else xi_gen(i)
        else:
            right = tau_gen(i)
        if p.valid(left) and p.valid(right):
            out.add((left, right), 0)
    return out


_COPRODUCT_CACHE: dict = {}


def coproduct(p: HopfPresentation, m: Monomial) -> Tensor:
    """psi(m), computed multiplicatively from the generator formulas
    psi(xi_n) = sum xi_{n-i}^{2^i} (x) xi_i and
    psi(tau_n) = tau_n (x) 1 + sum xi_{n-i}^{2^i} (x) tau_i."""
    if not p.valid(m):
        raise ValueError(f"{m} is not a basis monomial of {p.name}")
    key = (p, m)
    hit = _COPRODUCT_CACHE.get(key)
    if hit is not None:
        return hit
    if m.is_unit():
        res = Tensor({(ONE, ONE): 0})
    else:
        # peel off one generator factor
        if m.eps:
            i = max(i for i, e in enumerate(m.eps) if e)
            g = _gen_coproduct(p, "tau", i)
            rest = Monomial(m.eps[:i] + (0,) + m.eps[i + 1:], m.xi)
        else:
            i = len(m.xi)
            g = _gen_coproduct(p, "xi", i)
            xi = list(m.xi)
            xi[i - 1] -= 1
            rest = Monomial(m.eps, tuple(xi))
        res = _tensor_mul(p, g, coproduct(p, rest))
    _COPRODUCT_CACHE[key] = res
    return res


def reduced_coproduct(p: HopfPresentation, m: Monomial) -> Tensor:
    out = Tensor()
    for (a, b), k in coproduct(p, m):
        if not a.is_unit() and not b.is_unit():
            out.add((a, b), k)
    return out


def dual_action_constants(p: HopfPresentation, t_a: int, t_m: int) -> dict:
    """Structure constants of the dual algebra: {(a, b): {m: k}} meaning
    <a* . b*, m> = tau^k, for a of degree t_a and m of degree t_m."""
    table: dict = {}
    for m in monomial_basis(p, t_m):
        for (a, b), k in coproduct(p, m):
            if a.t == t_a:
                table.setdefault((a, b), {})[m] = k
    return table


def pairing_product(p: HopfPresentation, a: Monomial, b: Monomial) -> dict:
    """a* . b* in the dual basis, as {m: tau exponent}."""
    out = {}
    for m in monomial_basis(p, a.t + b.t):
        k = coproduct(p, m).terms.get((a, b))
        if k is not None:
            out[m] = k
    return out


# ---------------------------------------------------------------- comodules

@dataclass
class Comodule:
    """Left comodule, free over M2 on named generators (degrees with f = 0).

    coaction[g] is a list of (tau exponent, monomial, generator name)."""

    name: str
    generators: list          # [(name, TriDegree)]
    coaction: dict

    def degree(self, g: str) -> TriDegree:
        return dict(self.generators)[g]

    @property
    def top_degree(self) -> int:
        return max((d.t for _, d in self.generators), default=-1)

    def validate(self, p: HopfPresentation):
        degs = dict(self.generators)
        if len(degs) != len(self.generators):
            raise ValueError("duplicate generator names")
        for g, d in self.generators:
            if d.f != 0:
                raise ValueError(f"generator {g} must have f = 0")
            terms = self.coaction.get(g, [])
            if (0, ONE, g) not in terms:
                raise ValueError(f"counit fails at generator {g} in degree {d}")
            for k, m, h in terms:
                if h not in degs:
                    raise ValueError(f"coaction of {g} names unknown generator {h}")
                if not p.valid(m):
                    raise ValueError(f"coaction of {g} uses {m}, not in {p.name}")
                dh = degs[h]
                if m.t + dh.t != d.t or m.w + dh.w - k != d.w or k < 0:
                    raise ValueError(f"coaction term {m} (x) {h} of {g} is not homogeneous of degree {d}")
            if len({(m, h) for _, m, h in terms}) != len(terms):
                raise ValueError(f"repeated coaction term at generator {g}")
        for g, d in self.generators:
            left = Tensor()
            right = Tensor()
            for k, m, h in self.coaction[g]:
                for (a, b), kk in coproduct(p, m):
                    _add3(left, (a, b, h), k + kk)
                for k2, m2, h2 in self.coaction[h]:
                    _add3(right, (m, m2, h2), k + k2)
            if left != right:
                raise ValueError(f"coassociativity fails at generator {g} in degree {d}")
        return self


def _add3(t: Tensor, key, k):
    t.add(key, k)


def sphere() -> Comodule:
    return Comodule("S", [("g", TriDegree(0, 0, 0))], {"g": [(0, ONE, "g")]})


def ceta() -> Comodule:
    return Comodule(
        "Ceta",
        [("x0", TriDegree(0, 0, 0)), ("x2", TriDegree(2, 0, 1))],
        {"x0": [(0, ONE, "x0")], "x2": [(0, ONE, "x2"), (0, xi_gen(1), "x0")]},
    )


def cofiber_h0() -> Comodule:
    """Two cells joined by tau0: the comodule whose Ext is [S/h0, S] up to a shift."""
    return Comodule(
        "Ch0",
        [("x0", TriDegree(0, 0, 0)), ("x1", TriDegree(1, 0, 0))],
        {"x0": [(0, ONE, "x0")], "x1": [(0, ONE, "x1"), (0, tau_gen(0), "x0")]},
    )


def zero_comodule() -> Comodule:
    return Comodule("0", [], {})


def load_comodule(text: str, p: HopfPresentation = A, name: str = "M") -> Comodule:
    gens = []
    coact: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "gen" and len(tok) == 4:
                s, w = int(tok[2]), int(tok[3])
                gens.append((tok[1], TriDegree(s, 0, w)))
                coact.setdefault(tok[1], [])
            elif tok[0] == "coact" and len(tok) >= 5:
                k = int(tok[2])
                m = parse_monomial(" ".join(tok[3:-1]))
                coact.setdefault(tok[1], []).append((k, m, tok[-1]))
            else:
                raise ValueError("unknown directive")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}: {raw!r}") from None
    names = {g for g, _ in gens}
    for g in coact:
        if g not in names:
            raise ValueError(f"coaction given for undeclared generator {g}")
    for g, _ in gens:
        # a generator without coact lines is primitive
        if not coact[g]:
            coact[g] = [(0, ONE, g)]
    return Comodule(name, gens, coact).validate(p)


def dump_comodule(M: Comodule) -> str:
    lines = [f"# {M.name}"]
    for g, d in M.generators:
        lines.append(f"gen {g} {d.s} {d.w}")
    for g, _ in M.generators:
        for k, m, h in M.coaction.get(g, []):
            lines.append(f"coact {g} {k} {m} {h}")
    return "\n".join(lines) + "\n"
