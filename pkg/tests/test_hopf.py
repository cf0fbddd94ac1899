import itertools
import random

import pytest

from motext.hopf import (A, A1, A2, A2_MOD_XI1SQ_XI2, Monomial, ceta, coproduct, cofiber_h0,
                         dump_comodule, load_comodule, monomial_basis, multiply, parse_monomial,
                         sphere, tau_gen, xi_gen)
from motext.trigrade import TriDegree


def test_a1_basis_sizes():
    assert [len(monomial_basis(A1, t)) for t in range(8)] == [1, 1, 1, 2, 1, 1, 1, 0]
    assert A1.top_degree() == 6


def test_a_basis_sizes():
    assert [len(monomial_basis(A, t)) for t in range(8)] == [1, 1, 1, 2, 2, 2, 3, 4]


def test_generator_degrees():
    assert tau_gen(0).degree == TriDegree(1, 0, 0)
    assert tau_gen(1).degree == TriDegree(3, 0, 1)
    assert xi_gen(1).degree == TriDegree(2, 0, 1)
    assert xi_gen(2).degree == TriDegree(6, 0, 3)


def test_tau0_squared_is_tau_xi1():
    assert multiply(A1, tau_gen(0), tau_gen(0)) == (1, xi_gen(1))


def test_xi1_squared_vanishes_in_a1():
    assert not A1.valid(xi_gen(1, 2))
    assert A.valid(xi_gen(1, 2))


def test_coproduct_of_generators():
    terms = dict(coproduct(A, xi_gen(1)))
    assert terms == {(Monomial(), xi_gen(1)): 0, (xi_gen(1), Monomial()): 0}
    terms = dict(coproduct(A, tau_gen(1)))
    assert terms == {(Monomial(), tau_gen(1)): 0, (tau_gen(1), Monomial()): 0,
                     (xi_gen(1), tau_gen(0)): 0}


def _coassoc(p, m):
    left, right = {}, {}
    for (a, b), k in coproduct(p, m):
        for (a1, a2), k1 in coproduct(p, a):
            key = (a1, a2, b)
            left[key] = left.get(key, ()) + (k + k1,)
        for (b1, b2), k2 in coproduct(p, b):
            key = (a, b1, b2)
            right[key] = right.get(key, ()) + (k + k2,)
    odd = lambda d: {key: v[0] for key, v in d.items() if len(v) % 2}
    return odd(left) == odd(right)


@pytest.mark.parametrize("p", [A1, A2, A2_MOD_XI1SQ_XI2])
def test_coassociative_on_basis(p):
    for t in range(0, 13):
        for m in monomial_basis(p, t):
            assert _coassoc(p, m), m


def test_multiplication_associative_spot_check():
    rng = random.Random(7)
    basis = [m for t in range(1, 9) for m in monomial_basis(A, t)]
    for _ in range(60):
        x, y, z = (rng.choice(basis) for _ in range(3))

        def mul(u, v):
            r = multiply(A, u[1], v[1])
            return None if r is None else (u[0] + v[0] + r[0], r[1])
        xy = mul((0, x), (0, y))
        yz = mul((0, y), (0, z))
        left = None if xy is None else mul(xy, (0, z))
        right = None if yz is None else mul((0, x), yz)
        assert left == right, (x, y, z)


def test_parse_monomial():
    assert parse_monomial("tau0*xi1") == multiply(A, tau_gen(0), xi_gen(1))[1]
    assert parse_monomial("xi1^2") == xi_gen(1, 2)
    with pytest.raises(ValueError):
        parse_monomial("zeta3")


def test_builtin_comodules_validate():
    sphere().validate(A)
    ceta().validate(A)
    cofiber_h0().validate(A1)


def test_ceta_file_format():
    text = "gen x0 0 0\ngen x2 2 1\ncoact x2 0 1 x2\ncoact x2 0 xi1 x0\n"
    M = load_comodule(text, A, "Ceta")
    assert M.degree("x2") == TriDegree(2, 0, 1)
    assert sorted(M.coaction["x2"], key=str) == sorted(ceta().coaction["x2"], key=str)
    again = load_comodule(dump_comodule(M), A)
    assert again.coaction == M.coaction


def test_sphere_file():
    M = load_comodule("gen g 0 0\n", A)
    assert len(M.generators) == 1


def test_coassociativity_violation_rejected():
    # x3 -> xi1 (x) x1 but x1 -> tau0 (x) x0 needs a matching tau0 xi1 term on x3
    text = ("gen x0 0 0\ngen x1 1 0\ngen x3 3 1\ncoact x1 0 1 x1\ncoact x1 0 tau0 x0\n"
            "coact x3 0 1 x3\ncoact x3 0 xi1 x1\n")
    with pytest.raises(ValueError, match="coassociativity"):
        load_comodule(text, A)


def test_inhomogeneous_coaction_rejected():
    with pytest.raises(ValueError):
        load_comodule("gen x0 0 0\ngen x2 2 0\ncoact x2 0 1 x2\ncoact x2 0 xi1 x0\n", A)


def test_missing_counit_rejected():
    with pytest.raises(ValueError, match="counit"):
        load_comodule("gen x0 0 0\ngen x2 2 1\ncoact x2 0 xi1 x0\n", A)


def test_monomial_outside_presentation_rejected():
    with pytest.raises(ValueError):
        load_comodule("gen x0 0 0\ngen x4 4 2\ncoact x4 0 1 x4\ncoact x4 0 xi1^2 x0\n", A1)
