import pytest
from hypothesis import given, strategies as st

from artifact.errors import NoFactorization, NotSquarefree
from artifact.padic import is_close
from artifact.matalg import (
    EMatrix, EPoly, char_poly, companion, dagger, discriminant, herm_factor, herm_isometry, herm_normalize,
    is_hermitian, quadratic_roots, resultant,
)

from conftest import CTX3, escalars, small_ints
import oracles


def mat(ctx, rows):
    return EMatrix(ctx, [[ctx.E(*z) if isinstance(z, tuple) else z for z in r] for r in rows])


matrices = st.integers(1, 3).flatmap(
    lambda n: st.lists(st.lists(escalars(), min_size=n, max_size=n), min_size=n, max_size=n)
).map(lambda rows: EMatrix(CTX3, rows))


def hermitian(ctx, rows):
    n = len(rows)
    M = EMatrix(ctx, rows)
    return (M + M.dagger()) * ctx.F(2).inverse() if n else M


def test_dagger_examples(ctx):
    I = EMatrix.identity(ctx, 2)
    assert dagger(I) == I
    assert dagger(I * ctx.omega) == I * (-ctx.omega)


@given(matrices)
def test_dagger_is_conjugate_transpose(M):
    D = dagger(M)
    for i in range(M.rows):
        for j in range(M.cols):
            assert D[j, i] == M[i, j].conj()
    assert dagger(D) == M


@given(matrices)
def test_det_matches_cofactor_expansion(M):
    ctx = M.ctx
    assert is_close(M.det(), oracles.cofactor_det([list(r) for r in M.e], ctx.E(0), ctx.E(1)))


@given(matrices, st.data())
def test_det_multiplicative(M, data):
    n = M.rows
    rows = data.draw(st.lists(st.lists(escalars(), min_size=n, max_size=n), min_size=n, max_size=n))
    N = EMatrix(CTX3, rows)
    # singular draws cancel to zero only up to working precision
    assert is_close((M @ N).det(), M.det() * N.det())


@given(matrices)
def test_inverse(M):
    d = M.det()
    if d.v is None or d.v > 4:
        return
    assert (M @ M.inv()).is_close(EMatrix.identity(M.ctx, M.rows))


def test_char_poly_examples(ctx):
    assert char_poly(EMatrix.identity(ctx, 2)) == EPoly(ctx, [1, -2, 1])
    assert char_poly(EMatrix.diag(ctx, [4, 7])) == EPoly(ctx, [28, -11, 1])


@given(matrices)
def test_char_poly_against_minors(M):
    f = char_poly(M)
    ts = list(range(M.rows + 1))
    assert all(is_close(f(t), v) for t, v in zip(ts, oracles.charpoly_values(M, ts)))


@given(matrices)
def test_cayley_hamilton(M):
    assert char_poly(M).eval_matrix(M).is_zero()


def test_resultant_examples(ctx):
    t = EPoly(ctx, [0, 1])
    assert resultant(EPoly(ctx, [-2, 1]), t) == ctx.E(2)
    a, b = ctx.E(5, 1), ctx.E(-4)
    assert resultant(EPoly.from_roots(ctx, [a]), EPoly.from_roots(ctx, [b])) == a - b


monic_quadratics = st.tuples(escalars(), escalars()).map(lambda c: EPoly(CTX3, [c[0], c[1], 1]))


@given(monic_quadratics, monic_quadratics)
def test_resultant_matches_sylvester(f, g):
    assert is_close(resultant(f, g), oracles.sylvester_resultant(f.c, g.c, CTX3))


@given(st.lists(escalars(), min_size=1, max_size=3), st.lists(escalars(), min_size=1, max_size=3))
def test_resultant_root_product(ra, rb):
    ctx = CTX3
    prod = ctx.E(1)
    for a in ra:
        for b in rb:
            prod = prod * (a - b)
    assert is_close(resultant(EPoly.from_roots(ctx, ra), EPoly.from_roots(ctx, rb)), prod)


def test_companion_char_poly(ctx):
    f = EPoly(ctx, [3, -1, 4, 1])
    assert char_poly(companion(f)) == f


def test_discriminant_of_split_quadratic(ctx):
    f = EPoly.from_roots(ctx, [ctx.E(2), ctx.E(11)])
    assert discriminant(f) == ctx.E(81)


def test_quadratic_roots_examples(ctx):
    r = quadratic_roots(EPoly(ctx, [-1, 0, 1]), "F")
    assert set(r) == {ctx.F(1), ctx.F(-1)}
    f = EPoly(ctx, [-ctx.eps, 0, 1])
    assert quadratic_roots(f, "F") == []
    rs = quadratic_roots(f, "E")
    assert set(rs) == {ctx.omega, -ctx.omega}
    with pytest.raises(NotSquarefree):
        quadratic_roots(EPoly(ctx, [1, -2, 1]))


@given(small_ints, small_ints)
def test_quadratic_roots_evaluate_to_zero(a, b):
    if a == b:
        return
    ctx = CTX3
    f = EPoly.from_roots(ctx, [ctx.E(a), ctx.E(b)])
    if discriminant(f).val >= ctx.cmp_prec:
        return
    roots = quadratic_roots(f, "F")
    assert len(roots) == 2
    for r in roots:
        assert f(r).val >= ctx.cmp_prec


def test_herm_factor_examples(ctx):
    I = EMatrix.identity(ctx, 2)
    B = herm_factor(I)
    assert (B @ B.dagger()).is_close(I)
    with pytest.raises(NoFactorization):
        herm_factor(EMatrix.diag(ctx, [ctx.p]))
    H = EMatrix.diag(ctx, [ctx.p, ctx.p])
    B = herm_factor(H)
    assert (B @ B.dagger()).is_close(H)


hermitian_matrices = st.integers(1, 3).flatmap(
    lambda n: st.lists(st.lists(escalars(), min_size=n, max_size=n), min_size=n, max_size=n)
).map(lambda rows: hermitian(CTX3, rows))


@given(hermitian_matrices)
def test_herm_normalize_diagonalizes(H):
    d = H.det()
    if d.v is None or d.v > 4:
        return
    assert is_hermitian(H)
    P, c = herm_normalize(H)
    n = H.rows
    target = EMatrix.diag(CTX3, [1] * (n - 1) + [CTX3.p if c else 1])
    assert (P @ H @ P.dagger()).is_close(target)
    assert c == d.to_f().v % 2


@given(hermitian_matrices)
def test_herm_isometry(H):
    d = H.det()
    if d.v is None or d.v > 4:
        return
    n = H.rows
    G = EMatrix.diag(CTX3, [1] * (n - 1) + [CTX3.p if d.to_f().v % 2 else 1])
    B = herm_isometry(G, H)
    assert (B @ G @ B.dagger()).is_close(H)


def test_block_diag_rectangular(ctx):
    A = EMatrix.from_ints(ctx, [[1], [2]])
    B = EMatrix.from_ints(ctx, [[3, 4]])
    M = EMatrix.block_diag(A, B)
    assert M.shape == (3, 3)
    assert M[2, 1] == ctx.E(3) and M[0, 1] == ctx.E(0)


def test_json_roundtrip(ctx):
    M = mat(ctx, [[(1, 2), (0, 0)], [(ctx.p, -1), (5, 5)]]) * ctx.F(ctx.p) ** -1
    assert EMatrix.from_json(ctx, M.to_json()) == M
    f = char_poly(M)
    assert EPoly.from_json(ctx, f.to_json()) == f
