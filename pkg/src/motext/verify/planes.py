"""Transport of vanishing planes along a normal extension step.

Given a vanishing plane f > a*s + b*w + c for the quotient piece and a plane
f > m*s + c0 for the fibre piece generated by beta of degree (s0, f0, w0),
the total object vanishes above the planes returned by propagate_plane.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..trigrade import Plane, TriDegree


class DegenerateConfiguration(ValueError):
    pass


def _q(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("use exact rationals")
    return Fraction(x)


@dataclass(frozen=True)
class PropagationInput:
    a: Fraction
    b: Fraction
    c: Fraction | None
    beta: TriDegree
    nilpotent: bool = False
    m: Fraction | None = None      # defaults to f0/s0, the slope of the ray through beta
    c0: Fraction | None = None

    def __post_init__(self):
        s0, f0, w0 = self.beta.s, self.beta.f, self.beta.w
        if s0 <= 0 or f0 <= 0 or w0 <= 0:
            raise ValueError("beta must have positive s, f and w")
        object.__setattr__(self, "a", _q(self.a))
        object.__setattr__(self, "b", _q(self.b))
        if self.c is not None:
            object.__setattr__(self, "c", _q(self.c))
        m = Fraction(f0, s0) if self.m is None else _q(self.m)
        if m < Fraction(f0, s0):
            raise ValueError(f"m = {m} must be at least f0/s0 = {Fraction(f0, s0)}")
        object.__setattr__(self, "m", m)
        if self.c0 is not None:
            object.__setattr__(self, "c0", _q(self.c0))


def propagate_plane(inp: PropagationInput) -> list:
    """Planes bounding the vanishing region after one extension step.

    Case 1 (f0 <= a*s0 + b*w0, or beta nilpotent): the input plane survives
    with an undetermined intercept, together with the fibre plane (m, 0, c0).
    Case 2: a single plane with the new slopes and an undetermined intercept.
    """
    a, b, m = inp.a, inp.b, inp.m
    s0, f0, w0 = inp.beta.s, inp.beta.f, inp.beta.w
    if inp.nilpotent or f0 <= a * s0 + b * w0:
        return [Plane(a, b, None), Plane(m, 0, inp.c0)]
    den = b * w0 - s0 * (m - a)
    if den == 0:
        raise DegenerateConfiguration("degenerate configuration: b*w0 - s0*(m - a) = 0")
    slope_s = (m * b * w0 - f0 * (m - a)) / den
    slope_w = (b * f0 - m * b * s0) / den
    return [Plane(slope_s, slope_w, None)]


def anchor_intercept(p: Plane, point: TriDegree) -> Plane:
    """The plane with p's slopes passing through point."""
    return Plane(p.a, p.b, Fraction(point.f) - p.a * point.s - p.b * point.w)


def slope_pipeline(steps, start: Plane, anchor: TriDegree | None = None) -> list:
    """Run successive extension steps [(beta, nilpotent), ...] from start;
    returns the plane after each step (anchored at the end if requested)."""
    cur = start
    out = []
    for beta, nil in steps:
        planes = propagate_plane(PropagationInput(cur.a, cur.b, cur.c, beta, nil))
        cur = planes[0]
        out.append(cur)
    if anchor is not None:
        cur = anchor_intercept(cur, anchor)
        out.append(cur)
    return out
