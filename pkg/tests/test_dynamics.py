import pytest
from hypothesis import given, strategies as st

from artifact.dynamics import (
    _residue_multiplicity, cab_factor, cayley, cayley_charpoly_transform, cayley_inv, cayley_matrix, check_tjd,
    descent_data, eigenvalue_restriction, fixed_by_power, is_residually_unipotent, is_strongly_compact, tjd,
    tjd_exponent,
)
from artifact.endoscopy import EndoDatum, lie_lift, lie_transfer_factor, transfer_factor
from artifact.errors import NotIntegral, NotStronglyCompact, Singular
from artifact.harness.sampling import case_rng, rand_h, rand_integral_matrix, rand_unitary
from artifact.matalg import EMatrix, EPoly, char_poly
from artifact.orbital import iwasawa_cosets
from artifact.padic import eta
from artifact.symspace import LiePoint, SymPoint, chi, is_member, lift_from_herm, locus, split_forms, symmetrize

from conftest import CTX3, escalars
import oracles

seeds = st.integers(0, 10**6)
nus = st.sampled_from([1, -1])


def _rng(seed, k=0):
    return case_rng(seed, "dynamics-test", k)


def _lie_sample(seed, n):
    rng = _rng(seed)
    forms = split_forms(CTX3, n)
    for _ in range(50):
        d = LiePoint(rand_integral_matrix(CTX3, rng, n), forms)
        if (EMatrix.identity(CTX3, 2 * n) - d.delta()).det().val == 0:
            return d
    return None


def test_cayley_of_zero(ctx):
    for nu in (1, -1):
        x = cayley(LiePoint(EMatrix.zeros(ctx, 2, 2), split_forms(ctx, 2)), nu)
        assert x.mat == EMatrix.identity(ctx, 4) * ctx.E(-nu)
        assert cayley_inv(x, nu).is_zero()


@given(seeds, st.integers(1, 3), nus)
def test_cayley_roundtrip_and_membership(seed, n, nu):
    d = _lie_sample(seed, n)
    if d is None:
        return
    x = cayley(d, nu)
    assert is_member(x.mat)
    assert cayley_inv(x, nu).is_close(d.delta())


@given(seeds, st.integers(1, 3), nus)
def test_cayley_commutes_with_contraction(seed, n, nu):
    d = _lie_sample(seed, n)
    if d is None:
        return
    # R(c(delta)) = c(r(delta)) with r(delta) = -X X^*
    assert cayley(d, nu).A.is_close(cayley_matrix(d.r(), nu))


@given(seeds, nus)
def test_cayley_equivariance(seed, nu):
    d = _lie_sample(seed, 2)
    if d is None:
        return
    h1, h2 = rand_h(CTX3, _rng(seed, 1), 2)
    H = EMatrix.block_diag(h1, h2)
    assert cayley(d.conj_by(h1, h2), nu).mat.is_close(H @ cayley(d, nu).mat @ H.inv())


@given(seeds, nus)
def test_cayley_inverse_on_members(seed, nu):
    x = symmetrize(rand_unitary(CTX3, _rng(seed), 4))
    I = EMatrix.identity(CTX3, 4)
    if (I * CTX3.E(nu) - x.mat).det().val != 0:
        return
    delta = cayley_inv(x, nu)
    assert cayley(delta, nu).mat.is_close(x.mat)


def test_cayley_inverse_singular_on_the_divisor(ctx):
    x = SymPoint(EMatrix.identity(ctx, 2), split_forms(ctx, 1))
    with pytest.raises(Singular):
        cayley_inv(x, 1)


def test_charpoly_transform_examples(ctx):
    t = EPoly(ctx, [0, 1])
    for nu in (1, -1):
        assert cayley_charpoly_transform(t, nu) == EPoly(ctx, [nu, 1])


@given(escalars(), escalars(), nus)
def test_charpoly_transform_on_diagonals(lam, mu, nu):
    ctx = CTX3
    for z in (lam, mu):
        if (ctx.E(1) - z).val != 0:
            return
    f = EPoly.from_roots(ctx, [lam, mu])
    g = cayley_charpoly_transform(f, nu)
    assert g.degree == f.degree
    assert g.is_close(char_poly(cayley_matrix(EMatrix.diag(ctx, [lam, mu]), nu)))


def test_cab_factor_unit_case(ctx):
    za = EPoly.from_roots(ctx, [ctx.E(0)])
    zb = EPoly.from_roots(ctx, [ctx.E(2)])
    assert cab_factor(None, 1, 1, 1, (za, zb)).v == 0


def test_cab_factor_example(ctx):
    # a = b = 1, nu = 1, z_a - 1 of valuation 1, z_b - 1 a unit
    za = EPoly.from_roots(ctx, [ctx.E(1 + ctx.p)])
    zb = EPoly.from_roots(ctx, [ctx.E(0)])
    C = cab_factor(None, 1, 1, 1, (za, zb))
    assert C.v == -1
    # (-2)^1 / ((1 - z_a)(1 - z_b)) = -2 / (-p) = 2/p
    assert C == ctx.F(2) / ctx.F(ctx.p)


@pytest.mark.parametrize("lams", [(-1, -4), (-1, -10), (-2, -5), (-1, -28), (-4, -7)])
@pytest.mark.parametrize("nu", [1, -1])
def test_cab_factor_relates_transfer_factors(ctx, lams, nu):
    forms1 = split_forms(ctx, 1)
    da = lie_lift(EMatrix.diag(ctx, [lams[0]]), forms1)
    db = lie_lift(EMatrix.diag(ctx, [lams[1]]), forms1)
    d = lie_lift(EMatrix.diag(ctx, list(lams)))
    datum = EndoDatum(1, 1)
    xa, xb, x = cayley(da, nu), cayley(db, nu), cayley(d, nu)
    lie = lie_transfer_factor(da, db, d, datum)
    grp = transfer_factor(xa, xb, x, datum)
    C = cab_factor(x, 1, 1, nu, (chi(xa), chi(xb)))
    assert lie.sign == eta(C) * grp.sign
    assert lie.qexp == grp.qexp - C.v


def test_tjd_identity(ctx):
    I = SymPoint(EMatrix.identity(ctx, 4), split_forms(ctx, 2))
    t = tjd(I)
    assert t.x_as.mat == I.mat and t.x_tu.mat.is_close(I.mat)
    mI = SymPoint(-EMatrix.identity(ctx, 4), split_forms(ctx, 2))
    t = tjd(mI)
    assert t.x_as.mat.is_close(mI.mat) and t.x_tu.mat.is_close(I.mat)


def test_tjd_exponent():
    assert tjd_exponent(1) == 12
    assert tjd_exponent(2) == 840


@given(seeds, st.integers(1, 2))
def test_tjd_properties(seed, n):
    x = symmetrize(rand_unitary(CTX3, _rng(seed), 2 * n))
    t = tjd(x)
    assert all(check_tjd(x, t).values())
    # the absolutely semisimple part is a polynomial limit, so it commutes with conjugation
    h1, h2 = rand_h(CTX3, _rng(seed, 1), n)
    H = EMatrix.block_diag(h1, h2)
    tc = tjd(SymPoint(H @ x.mat @ H.inv(), x.forms))
    assert tc.x_as.mat.is_close(H @ t.x_as.mat @ H.inv())


@given(seeds)
def test_tjd_on_nonintegral_conjugates(seed):
    rng = _rng(seed)
    x = symmetrize(rand_unitary(CTX3, rng, 4))
    cos = [c for c in iwasawa_cosets(CTX3, 1) if c[0] != 0]
    _, _, g, gi = cos[int(rng.integers(0, len(cos)))]
    y = SymPoint(EMatrix.block_diag(g, g) @ x.mat @ EMatrix.block_diag(gi, gi), x.forms)
    t = tjd(y)
    assert all(check_tjd(y, t).values())


def test_fixed_by_power(ctx):
    x = SymPoint(-EMatrix.identity(ctx, 2), split_forms(ctx, 1))
    assert fixed_by_power(x)
    y = lift_from_herm(EMatrix.diag(ctx, [3]))
    assert not fixed_by_power(y)
    assert is_residually_unipotent(EMatrix.identity(ctx, 2))


def test_strongly_compact_examples(ctx):
    assert is_strongly_compact(symmetrize(rand_unitary(ctx, _rng(0), 4)))
    x = SymPoint(EMatrix.diag(ctx, [ctx.F(ctx.p) ** -1, 1]), split_forms(ctx, 1))
    assert not is_strongly_compact(x)
    with pytest.raises(NotStronglyCompact):
        tjd(x)


@given(seeds)
def test_strongly_compact_against_newton_polygon(seed):
    rng = _rng(seed)
    M = rand_integral_matrix(CTX3, rng, 2)
    k = int(rng.integers(-1, 2))
    M = M * CTX3.F(3) ** k
    x = SymPoint(M, split_forms(CTX3, 1))
    slopes = oracles.newton_slopes([c.v for c in char_poly(M).c])
    assert is_strongly_compact(x) == (len(slopes) == 2 and all(s == 0 for s in slopes))


def test_descent_on_very_regular_point(ctx):
    x = lift_from_herm(EMatrix.diag(ctx, [10, 0]))
    assert locus(x, -1) == "very_regular"
    d = descent_data(x)
    assert d.comps[-1] is None
    assert d.gamma.mat.is_close(EMatrix.identity(ctx, 4))
    assert d.y.mat.is_close(x.mat)


def test_descent_recovers_block_components(ctx):
    x = lift_from_herm(EMatrix.diag(ctx, [10, 8]))
    d = descent_data(x)
    assert chi(d.comps[1]).is_close(EPoly.from_roots(ctx, [ctx.E(10)]))
    assert chi(d.comps[-1]).is_close(EPoly.from_roots(ctx, [ctx.E(8)]))
    g, y = d.gamma.mat, d.y.mat
    assert (g @ y).is_close(x.mat) and (y @ g).is_close(x.mat)
    assert (g @ g).is_close(EMatrix.identity(ctx, 4))
    assert is_member(g)


@given(seeds)
def test_descent_identities_on_conjugates(seed):
    ctx = CTX3
    rng = _rng(seed)
    a, b = 1 + 3 * int(rng.integers(1, 20)), -1 + 3 * int(rng.integers(1, 20))
    try:
        x = lift_from_herm(EMatrix.diag(ctx, [a, b]))
    except Exception:
        return
    if not x.mat.is_integral():
        return
    h1, h2 = rand_h(ctx, rng, 2)
    x = x.conj_by(EMatrix.block_diag(h1, h2))
    d = descent_data(x)
    assert d.eigen_ok
    assert (d.gamma.mat @ d.y.mat).is_close(x.mat)
    assert locus(d.comps[1], -1) == "very_regular"
    assert locus(d.comps[-1], 1) == "very_regular"


def test_descent_requires_integral_points(ctx):
    x = lift_from_herm(EMatrix.diag(ctx, [ctx.F(ctx.p) ** -1]))
    with pytest.raises(NotIntegral):
        descent_data(x)


@given(seeds, nus)
def test_residue_multiplicity_against_rank_oracle(seed, nu):
    rng = _rng(seed)
    x = symmetrize(rand_unitary(CTX3, rng, 4))
    M = x.mat
    assert _residue_multiplicity(char_poly(M), nu) == oracles.residue_eigen_multiplicity(M, nu)


@given(seeds)
def test_eigenvalue_restriction_on_tjd_parts(seed):
    x = symmetrize(rand_unitary(CTX3, _rng(seed), 4))
    xas = tjd(x).x_as.mat
    assert eigenvalue_restriction(xas, 1) and eigenvalue_restriction(xas, -1)


def test_eigenvalue_restriction_fails_off_the_locus(ctx):
    # eigenvalue 1 + p reduces to 1 but is not 1
    assert not eigenvalue_restriction(EMatrix.diag(ctx, [1 + ctx.p, 0]), 1)
