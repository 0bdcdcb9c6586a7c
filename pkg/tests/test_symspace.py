import pytest
from hypothesis import given, strategies as st

from artifact.errors import Degenerate, NoLift, NotIntegral
from artifact.harness.sampling import case_rng, rand_h, rand_unitary
from artifact.lattice import HermForm
from artifact.matalg import EMatrix, EPoly, char_poly
from artifact.symspace import (
    LiePoint, SymPoint, car_from_chi, chi, contraction, eps_matrix, invariant, is_integral, is_member, is_rss,
    lift_from_herm, locus, split_forms, symmetrize,
)

from conftest import CTX3

seeds = st.integers(0, 10**6)


def _rng(seed):
    return case_rng(seed, "symspace-test", 0)


def _diag_point(ctx, roots):
    return lift_from_herm(EMatrix.diag(ctx, roots))


def test_identity_is_the_base_point(ctx):
    for n in (1, 2):
        I = EMatrix.identity(ctx, 2 * n)
        assert is_member(I)
        assert symmetrize(I).mat == I
        assert contraction(SymPoint(I, split_forms(ctx, n))) == EMatrix.identity(ctx, n)


def test_non_unitary_is_not_member(ctx):
    assert not is_member(EMatrix.diag(ctx, [2, 1]))
    assert not is_member(eps_matrix(ctx, 1))  # trace(eps * eps) = 2


@given(seeds, st.integers(1, 3))
def test_symmetrization_lands_in_the_space(seed, n):
    g = rand_unitary(CTX3, _rng(seed), 2 * n)
    x = symmetrize(g)
    assert is_member(x.mat)
    assert is_integral(x)


@given(seeds, st.integers(1, 2))
def test_block_relations(seed, n):
    x = symmetrize(rand_unitary(CTX3, _rng(seed), 2 * n))
    A, B, D = x.A, x.B, x.D
    Bs = x.Bstar
    I = EMatrix.identity(CTX3, n)
    assert (A @ A).is_close(I - B @ Bs)
    assert (D @ D).is_close(I - Bs @ B)
    assert (A @ B).is_close(B @ D)
    assert (Bs @ A).is_close(D @ Bs)


def test_contraction_of_block_diagonal(ctx):
    x1, x2 = _diag_point(ctx, [3]), _diag_point(ctx, [6])
    H = EMatrix.block_diag(x1.A, x2.A)
    assert lift_from_herm(H).A == EMatrix.diag(ctx, [3, 6])


def test_chi_examples(ctx):
    assert chi(_diag_point(ctx, [6])) == EPoly.from_roots(ctx, [ctx.E(6)])
    x = _diag_point(ctx, [6, 12])
    assert chi(x) == chi(_diag_point(ctx, [6])) * chi(_diag_point(ctx, [12]))


@given(seeds)
def test_chi_is_h_invariant(seed):
    rng = _rng(seed)
    x = _diag_point(CTX3, [0, 3])
    h1, h2 = rand_h(CTX3, rng, 2)
    y = x.conj_by(EMatrix.block_diag(h1, h2))
    assert chi(y).is_close(chi(x))
    assert is_member(y.mat)


def test_car_from_chi_rank_one(ctx):
    a = ctx.E(7)
    f = car_from_chi(EPoly.from_roots(ctx, [a]))
    assert f == EPoly(ctx, [1, -2 * 7, 1])
    assert car_from_chi(EPoly.from_roots(ctx, [ctx.E(1)])) == EPoly(ctx, [1, -2, 1])


@given(seeds, st.integers(1, 3))
def test_car_from_chi_is_the_full_char_poly(seed, n):
    x = symmetrize(rand_unitary(CTX3, _rng(seed), 2 * n))
    assert car_from_chi(invariant(x)).is_close(char_poly(x.mat))


def test_is_rss_examples(ctx):
    assert is_rss(_diag_point(ctx, [0, 3]))
    # chi(1) = 0 makes the point singular: I - A^2 is not invertible
    with pytest.raises(Degenerate):
        lift_from_herm(EMatrix.diag(ctx, [1, 3]))
    assert not is_rss(SymPoint(EMatrix.identity(ctx, 4), split_forms(ctx, 2)))


@given(st.lists(st.integers(-40, 40), min_size=2, max_size=2, unique=True), seeds)
def test_is_rss_against_eigenvalues(roots, seed):
    # for a lift of diag(roots): rss iff roots distinct and not +-1, which the lift guarantees
    ctx = CTX3
    if any(r in (1, -1) for r in roots):
        return
    try:
        x = _diag_point(ctx, roots)
    except NoLift:
        return
    h1, h2 = rand_h(ctx, _rng(seed), 2)
    assert is_rss(x.conj_by(EMatrix.block_diag(h1, h2)))


def test_locus_examples(ctx):
    x = _diag_point(ctx, [0])
    assert locus(x, 1) == "very_regular" and locus(x, -1) == "very_regular"
    y = _diag_point(ctx, [1 + 9])
    assert locus(y, 1) == "not_very_regular"
    assert locus(y, -1) == "very_regular"
    with pytest.raises(NotIntegral):
        locus(_diag_point(ctx, [ctx.F(ctx.p) ** -2]), 1)


def test_is_integral_examples(ctx):
    assert is_integral(SymPoint(EMatrix.identity(ctx, 2), split_forms(ctx, 1)))
    # a = 1/p gives B with val -1
    x = _diag_point(ctx, [ctx.F(ctx.p) ** -1])
    assert not is_integral(x)
    assert x.B.min_val() == -1


def test_lift_examples(ctx):
    x = _diag_point(ctx, [0])
    assert x.B.is_close(EMatrix.identity(ctx, 1)) or (x.B @ x.B.dagger()).is_close(EMatrix.identity(ctx, 1))
    assert x.D.is_close(EMatrix.zeros(ctx, 1, 1))
    # 1 - a^2 of odd valuation has no lift with split forms
    with pytest.raises(NoLift):
        _diag_point(ctx, [1 + ctx.p])


@given(seeds)
def test_lift_roundtrip(seed):
    rng = _rng(seed)
    U = rand_unitary(CTX3, rng, 2)
    A = U @ EMatrix.diag(CTX3, [0, 3 * int(rng.integers(1, 50))]) @ U.dagger()
    try:
        x = lift_from_herm(A)
    except NoLift:
        return
    assert contraction(x).is_close(A)
    assert is_member(x.mat)


def test_nonsplit_lift(ctx):
    forms = (HermForm.split(ctx, 1), HermForm.nonsplit(ctx, 1))
    x = lift_from_herm(EMatrix.diag(ctx, [1 + ctx.p]), forms)
    assert is_member(x.mat, forms)


def test_lie_point(ctx):
    d = LiePoint(EMatrix.diag(ctx, [1, 3]), split_forms(ctx, 2))
    assert d.r() == EMatrix.diag(ctx, [-1, -9])
    delta = d.delta()
    assert LiePoint.from_delta(delta).X == d.X
    assert LiePoint.from_json(ctx, d.to_json()).X == d.X


def test_sympoint_json(ctx):
    x = _diag_point(ctx, [0, 3])
    y = SymPoint.from_json(ctx, x.to_json())
    assert y.mat == x.mat and [f.label for f in y.forms] == ["split", "split"]
