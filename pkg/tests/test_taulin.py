import pytest
from hypothesis import given, settings, strategies as st

from motext.taulin import (FilteredHomology, GradedFreeModule, TauMatrix, TauVector, cokernel,
                           element, identity, kernel_basis, snf, snf_diagonal, solve)
from motext.trigrade import TriDegree


def free(*weights):
    return GradedFreeModule.from_weights(weights)


def upper_triangular():
    """[[tau^2, 1], [0, tau]]: codomain weights (0, -1), domain weights (2, 0)."""
    return TauMatrix.from_entries(free(2, 0), free(0, -1), {(0, 0): 2, (0, 1): 0, (1, 1): 1})


def check_snf(m):
    U, diag, V = snf(m)
    assert U @ m @ V == snf_diagonal(m, U, diag, V)
    assert diag == sorted(diag)
    return diag


def test_snf_already_diagonal():
    m = TauMatrix.from_entries(free(1), free(0), {(0, 0): 1})
    assert check_snf(m) == [1]


def test_snf_upper_triangular():
    assert check_snf(upper_triangular()) == [0, 3]


def test_snf_zero_matrix():
    m = TauMatrix(free(0, 1), free(0, 0, 0), [0, 0])
    assert check_snf(m) == []


def test_kernel_examples():
    tau = TauMatrix.from_entries(free(1), free(0), {(0, 0): 1})
    K, inc = kernel_basis(tau)
    assert K.rank == 0
    pair = TauMatrix.from_entries(free(1, 1), free(0), {(0, 0): 1, (0, 1): 1})
    K, inc = kernel_basis(pair)
    assert K.rank == 1 and inc.columns == [0b11]
    zero = TauMatrix(free(0, 2, 5), free(1), [0, 0, 0])
    K, inc = kernel_basis(zero)
    assert K.rank == 3 and sorted(inc.columns) == [1, 2, 4]


def test_cokernel_examples():
    for k in (1, 2, 5):
        dec = cokernel(TauMatrix.from_entries(free(k), free(0), {(0, 0): k}))
        assert dec.free == [] and [o for _, o in dec.torsion] == [k]
    dec = cokernel(TauMatrix(free(), free(0, 1, 2), []))
    assert len(dec.free) == 3 and dec.torsion == []


def test_solve_examples():
    tau = TauMatrix.from_entries(free(1), free(0), {(0, 0): 1})
    # tau * x = tau^2 gives x = tau times the weight-1 generator, of weight 2
    x = solve(tau, {0: 2})
    assert x == TauVector(1, 2)
    assert element(tau.domain, {0: 1}) == x
    # tau * x = 1 has no solution
    assert solve(tau, {0: 0}) is None


def test_solve_upper_triangular_unit_target():
    # rows: tau^2 x0 + x1 = 1 and tau x1 = 0, so x1 = 0 and tau^2 x0 = 1: no solution
    assert solve(upper_triangular(), {0: 0}) is None
    # (0, 1) would need tau x1 = 1
    assert solve(upper_triangular(), {1: 0}) is None
    # (1, tau) is the image of the second basis vector
    assert solve(upper_triangular(), {0: 0, 1: 1}) == TauVector(0b10, 0)


def test_solve_rejects_inhomogeneous_target():
    m = upper_triangular()
    with pytest.raises(ValueError):
        solve(m, TauVector(0b11, -1))


def test_inhomogeneous_matrix_rejected():
    with pytest.raises(ValueError):
        TauMatrix.from_entries(free(0), free(1), {(0, 0): 0})


def test_filtered_homology_tau_torsion():
    # C_mid = F2[tau] e (u=0), d_in hits tau^3 e from u=3: H = F2[tau]/tau^3
    h = FilteredHomology([0], [0], [3], [1])
    assert [h.rank_at(u) for u in range(-1, 5)] == [0, 1, 1, 1, 0, 0]


@st.composite
def tau_matrices(draw):
    nr = draw(st.integers(0, 4))
    nc = draw(st.integers(0, 4))
    cw = draw(st.lists(st.integers(-3, 3), min_size=nr, max_size=nr))
    dw = draw(st.lists(st.integers(-3, 6), min_size=nc, max_size=nc))
    cols = []
    for j in range(nc):
        col = 0
        for i in range(nr):
            if dw[j] >= cw[i] and draw(st.booleans()):
                col |= 1 << i
        cols.append(col)
    return TauMatrix(free(*dw), free(*cw), cols)


@settings(max_examples=200, deadline=None)
@given(tau_matrices())
def test_snf_reconstructs(m):
    diag = check_snf(m)
    assert len(diag) <= min(m.shape)


@settings(max_examples=200, deadline=None)
@given(tau_matrices())
def test_kernel_inclusion_is_killed(m):
    K, inc = kernel_basis(m)
    assert (m @ inc).is_zero()


@settings(max_examples=200, deadline=None)
@given(tau_matrices(), st.data())
def test_solve_recovers_images(m, data):
    if m.domain.rank == 0:
        return
    w = data.draw(st.integers(max(m.domain.weights), max(m.domain.weights) + 3))
    bits = data.draw(st.integers(1, (1 << m.domain.rank) - 1))
    image = m.apply(TauVector(bits, w))
    if image.bits == 0:
        return
    x = solve(m, image)
    assert x is not None and m.apply(x) == image


def test_identity_composition():
    M = free(0, 1, 4)
    assert identity(M) @ identity(M) == identity(M)
