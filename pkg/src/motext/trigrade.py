"""Trigraded degrees (s, f, w) and half-space regions f > a*s + b*w + c."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True, order=True)
class TriDegree:
    s: int
    f: int
    w: int

    @property
    def t(self) -> int:
        return self.s + self.f

    @property
    def c(self) -> int:
        # coweight
        return self.t - self.w

    def __add__(self, other: "TriDegree") -> "TriDegree":
        return TriDegree(self.s + other.s, self.f + other.f, self.w + other.w)

    def __sub__(self, other: "TriDegree") -> "TriDegree":
        return TriDegree(self.s - other.s, self.f - other.f, self.w - other.w)

    def __neg__(self) -> "TriDegree":
        return TriDegree(-self.s, -self.f, -self.w)

    def scale(self, k: int) -> "TriDegree":
        return TriDegree(k * self.s, k * self.f, k * self.w)

    def __str__(self) -> str:
        return f"({self.s},{self.f},{self.w})"

    @classmethod
    def from_tw(cls, t: int, f: int, w: int) -> "TriDegree":
        return cls(t - f, f, w)


ZERO = TriDegree(0, 0, 0)
TAU = TriDegree(0, 0, -1)
H0 = TriDegree(0, 1, 0)
H1 = TriDegree(1, 1, 1)
H2 = TriDegree(3, 1, 2)
P = TriDegree(8, 4, 4)
C0 = TriDegree(8, 3, 5)
PH1 = TriDegree(9, 5, 5)
D0 = TriDegree(14, 4, 8)
TAU2 = TriDegree(6, 1, 3)
XI2 = TriDegree(5, 1, 3)
XI1_SQ = TriDegree(3, 1, 2)


def h_degree(i: int) -> TriDegree:
    """Degree of h_i, the class dual to Sq(2^i)."""
    if i == 0:
        return H0
    return TriDegree(2 ** i - 1, 1, 2 ** (i - 1))


def periodicity_degree(r: int) -> TriDegree:
    """Degree of the operator <h_{r+1}, h0^{2^r}, ->."""
    return TriDegree(2 ** (r + 1), 2 ** r, 2 ** r)


def v_degree(n: int) -> TriDegree:
    return TriDegree(2 ** (n + 1) - 2, 1, 2 ** n - 1)


def degree_add(d1: TriDegree, d2: TriDegree) -> TriDegree:
    return d1 + d2


_DEG_RE = re.compile(r"^\s*\(?\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)?\s*$")


def parse_degree(text: str) -> TriDegree:
    m = _DEG_RE.match(text)
    if not m:
        raise ValueError(f"bad degree syntax: {text!r}")
    return TriDegree(*(int(g) for g in m.groups()))


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("planes take exact rationals, not floats")
    return Fraction(x)


@dataclass(frozen=True)
class Plane:
    """The open region f > a*s + b*w + c.

    c may be None when the intercept is not known yet; such a plane can be
    anchored later but not used for membership tests.
    """

    a: Fraction
    b: Fraction = Fraction(0)
    c: Fraction | None = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))
        if self.c is not None:
            object.__setattr__(self, "c", _frac(self.c))

    def value(self, d: TriDegree) -> Fraction:
        if self.c is None:
            raise ValueError("plane has an undetermined intercept")
        return self.a * d.s + self.b * d.w + self.c

    def contains(self, d: TriDegree) -> bool:
        return d.f > self.value(d)

    def shift(self, dc) -> "Plane":
        return Plane(self.a, self.b, self.c - _frac(dc))

    def __str__(self) -> str:
        c = "c'" if self.c is None else str(self.c)
        return f"f > {self.a}*s + {self.b}*w + {c}"


def strictly_above(d: TriDegree, p: Plane) -> bool:
    return p.contains(d)
