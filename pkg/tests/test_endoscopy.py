from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from artifact.endoscopy import (
    EndoDatum, OrbitInvariant, TransferFactor, eigenline_norm_class, factor_data, factor_data_poly, kappa,
    lie_lift, lie_stable_reps, lie_transfer_factor, matches, nice_point, orbit_invariant, orbit_invariant_lie,
    relative_discriminant, stable_orbit_reps, transfer_factor,
)
from artifact.errors import NotStablyConjugate
from artifact.harness.sampling import case_rng, rand_h, rand_unitary
from artifact.lattice import HermForm
from artifact.matalg import EMatrix, EPoly
from artifact.symspace import lift_from_herm, split_forms

from conftest import CTX3

seeds = st.integers(0, 10**6)


def point(ctx, roots, label="split"):
    n = len(roots)
    return lift_from_herm(EMatrix.diag(ctx, roots), (HermForm.split(ctx, n), HermForm.of_label(ctx, n, label)))


def test_factor_data_split(ctx):
    fd = factor_data(EMatrix.diag(ctx, [0, 3]))
    assert [f.kind for f in fd.factors] == ["linear", "linear"]
    assert fd.split and fd.elliptic
    assert sorted(r.to_int() for r in fd.roots) == [0, 3]


def test_factor_data_unramified_is_not_elliptic(ctx):
    # t^2 - eps: disc = 4 eps, a non-square unit
    fd = factor_data_poly(EPoly(ctx, [-ctx.eps, 0, 1]))
    assert len(fd.factors) == 1 and fd.factors[0].kind == "unramified"
    assert not fd.elliptic


def test_factor_data_ramified_is_elliptic(ctx):
    fd = factor_data_poly(EPoly(ctx, [-ctx.p, 0, 1]))
    assert fd.factors[0].kind == "ramified" and fd.elliptic


def test_eigenline_classes(ctx):
    A = EMatrix.diag(ctx, [0, 3])
    assert eigenline_norm_class(A, ctx.F(0)) == 0
    assert eigenline_norm_class(A, ctx.F(3)) == 0
    x2 = stable_orbit_reps(point(ctx, [0, 3]))[1]
    assert eigenline_norm_class(x2.A, ctx.F(0)) == 1
    assert eigenline_norm_class(x2.A, ctx.F(3)) == 1


@given(seeds)
def test_eigenline_class_invariant_under_unitary_change(seed):
    # conjugating by a unitary moves eigenvectors isometrically
    ctx = CTX3
    U = rand_unitary(ctx, case_rng(seed, "endo-test", 0), 2)
    A = EMatrix.diag(ctx, [0, 3])
    B = U @ A @ U.dagger()
    for r in (0, 3):
        assert eigenline_norm_class(B, ctx.F(r)) == eigenline_norm_class(A, ctx.F(r))


def test_orbit_invariants(ctx):
    x = point(ctx, [0, 3])
    reps = stable_orbit_reps(x)
    assert len(reps) == 2 and reps[0] is x
    assert orbit_invariant(x, x) == OrbitInvariant((0, 0))
    assert orbit_invariant(x, reps[1]) == OrbitInvariant((1, 1))
    with pytest.raises(NotStablyConjugate):
        orbit_invariant(x, point(ctx, [0, 6]))


@given(seeds)
def test_invariant_transitivity(seed):
    ctx = CTX3
    rng = case_rng(seed, "endo-test", 1)
    x = point(ctx, [0, 9])
    x2 = stable_orbit_reps(x)[1]
    h1, h2 = rand_h(ctx, rng, 2)
    xs = [x, x2, x.conj_by(EMatrix.block_diag(h1, h2)), x2.conj_by(EMatrix.block_diag(h2, h1))]
    for a in xs:
        for b in xs:
            for c in xs:
                assert orbit_invariant(a, c) == orbit_invariant(a, b) + orbit_invariant(b, c)
    # the kernel condition: bits sum to zero
    assert sum(orbit_invariant(x, x2).bits) % 2 == 0


def test_rank_one_stable_class(ctx):
    x = point(ctx, [3])
    assert stable_orbit_reps(x) == [x]


def test_kappa_rule(ctx):
    fd = factor_data(EMatrix.diag(ctx, [0, 3]))
    chi_b = EPoly.from_roots(ctx, [ctx.E(3)])
    d = EndoDatum(1, 1)
    assert kappa(d, fd, OrbitInvariant((0, 0)), chi_b) == 1
    assert kappa(d, fd, OrbitInvariant((1, 1)), chi_b) == -1
    assert kappa(EndoDatum(2, 0), fd, OrbitInvariant((1, 1))) == 1


@given(st.tuples(st.integers(0, 1), st.integers(0, 1)), st.tuples(st.integers(0, 1), st.integers(0, 1)))
def test_kappa_is_a_character(u, v):
    ctx = CTX3
    fd = factor_data(EMatrix.diag(ctx, [0, 3]))
    chi_b = EPoly.from_roots(ctx, [ctx.E(0)])
    d = EndoDatum(1, 1)
    a, b = OrbitInvariant(u), OrbitInvariant(v)
    assert kappa(d, fd, a + b, chi_b) == kappa(d, fd, a, chi_b) * kappa(d, fd, b, chi_b)


def test_relative_discriminant(ctx):
    ta = EPoly.from_roots(ctx, [ctx.E(7)])
    tb = EPoly.from_roots(ctx, [ctx.E(2)])
    assert relative_discriminant(ta, tb) == ctx.F(5)
    assert relative_discriminant(ta, tb).v == 0


@given(st.lists(st.integers(-200, 200), min_size=1, max_size=2),
       st.lists(st.integers(-200, 200), min_size=1, max_size=2))
def test_relative_discriminant_root_product(ra, rb):
    ctx = CTX3
    prod = ctx.F(1)
    for a in ra:
        for b in rb:
            prod = prod * ctx.F(a - b)
    D = relative_discriminant(EPoly.from_roots(ctx, [ctx.E(a) for a in ra]),
                              EPoly.from_roots(ctx, [ctx.E(b) for b in rb]))
    assert (D - prod).v is None or (D - prod).v >= ctx.cmp_prec


def test_matches(ctx):
    xa, xb = point(ctx, [0]), point(ctx, [3])
    x = nice_point(xa, xb, split_forms(ctx, 2))
    assert matches(x, xa, xb)
    # a perturbation below the comparison precision is invisible, one of size p is not
    tiny = point(ctx, [3 + ctx.p ** ctx.cmp_prec])
    assert matches(x, xa, tiny)
    assert not matches(x, xa, point(ctx, [3 + ctx.p]))
    assert not matches(x, xa, point(ctx, [6]))


def test_transfer_factor_examples(ctx):
    forms = split_forms(ctx, 2)
    d = EndoDatum(1, 1)
    # val(D) = 0
    xa, xb = point(ctx, [0]), point(ctx, [8])  # D = -8, a unit
    x = nice_point(xa, xb, forms)
    assert transfer_factor(xa, xb, x, d) == TransferFactor(1, 0)
    # val(D) = 1: -q^-1
    xa, xb = point(ctx, [0]), point(ctx, [3])
    x = nice_point(xa, xb, forms)
    tf = transfer_factor(xa, xb, x, d)
    assert tf == TransferFactor(-1, -1)
    assert tf.value(ctx.p) == Fraction(-1, 3)
    # not matching
    assert transfer_factor(xa, point(ctx, [6]), x, d).sign == 0


def test_transfer_factor_flips_with_the_rational_class(ctx):
    forms = split_forms(ctx, 2)
    d = EndoDatum(1, 1)
    xa, xb = point(ctx, [0]), point(ctx, [9])
    x = nice_point(xa, xb, forms)
    x2 = stable_orbit_reps(x)[1]
    t1, t2 = transfer_factor(xa, xb, x, d), transfer_factor(xa, xb, x2, d)
    assert t1.sign == -t2.sign and t1.qexp == t2.qexp == -2


def test_lie_side(ctx):
    d = EndoDatum(1, 1)
    forms1 = split_forms(ctx, 1)
    da, db = lie_lift(EMatrix.diag(ctx, [-1]), forms1), lie_lift(EMatrix.diag(ctx, [-4]), forms1)
    dl = lie_lift(EMatrix.diag(ctx, [-1, -4]))
    reps = lie_stable_reps(dl)
    assert orbit_invariant_lie(dl, reps[1]) == OrbitInvariant((1, 1))
    t = lie_transfer_factor(da, db, dl, d)
    assert (t.sign, t.qexp) == (-1, -1)  # D = -1 - (-4) = 3


def test_datum_json():
    d = EndoDatum(1, 1, "nonsplit", "nonsplit")
    assert EndoDatum.from_json(d.to_json()) == d and d.ramified and d.n == 2
