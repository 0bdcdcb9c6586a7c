"""Cayley transforms, topological Jordan decomposition and descent at +-1.

c_nu(delta) = -nu (1 + delta)(1 - delta)^-1 and its inverse
beta_nu(x) = -(nu + x)(nu - x)^-1.  On eigenvalues, lambda -> z with
lambda = (z + nu) / (z - nu).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NonConvergence, NotInDescentLocus, NotIntegral, NotStronglyCompact, PrecisionExhausted, Singular,
)
from .lattice import HermForm, Lattice, hnf
from .matalg import EMatrix, EPoly, char_poly, herm_normalize
from .padic import FScalar, PrecisionContext
from .symspace import LiePoint, SymPoint, adjoint_W, is_member, split_forms


# Cayley transforms

def cayley_matrix(M: EMatrix, nu: int) -> EMatrix:
    """-nu (1 + M)(1 - M)^-1 for any square M."""
    ctx = M.ctx
    I = EMatrix.identity(ctx, M.rows)
    return ((I + M) @ (I - M).inv()) * ctx.E(-nu)


def cayley(delta: LiePoint | EMatrix, nu: int, forms=None) -> SymPoint:
    if isinstance(delta, LiePoint):
        forms = delta.forms
        delta = delta.delta()
    else:
        forms = split_forms(delta.ctx, delta.rows // 2) if forms is None else forms
    return SymPoint(cayley_matrix(delta, nu), forms)


def cayley_inv(x: SymPoint | EMatrix, nu: int) -> EMatrix:
    X = x.mat if isinstance(x, SymPoint) else x
    ctx = X.ctx
    I = EMatrix.identity(ctx, X.rows) * ctx.E(nu)
    return -((I + X) @ (I - X).inv())


def cayley_charpoly_transform(f: EPoly, nu: int, dim: int | None = None) -> EPoly:
    """(t - nu)^dim f(1)^-1 f((t + nu)/(t - nu))."""
    ctx = f.ctx
    dim = f.degree if dim is None else dim
    if dim < f.degree:
        raise ValueError("dim below the degree")
    f1 = f(1)
    if f1.v is None or f1.v >= ctx.cmp_prec:
        raise Singular("f(1) vanishes")
    tp = EPoly(ctx, [nu, 1])
    tm = EPoly(ctx, [-nu, 1])
    g = EPoly(ctx, [0])
    for k, c in enumerate(f.c):
        g = g + (tp ** k) * (tm ** (dim - k)) * c
    return g * f1.inverse()


def cab_factor(x: SymPoint | None, a: int, b: int, nu: int, split) -> FScalar:
    """(-2 nu)^(ab) / (chi_a(nu)^b chi_b(nu)^a), the product over root pairs of 1/((z_a - nu)(z_b - nu))."""
    chi_a, chi_b = split
    ctx = chi_a.ctx
    ca, cb = chi_a(nu), chi_b(nu)
    for c in (ca, cb):
        if c.v is None or c.v >= ctx.cmp_prec:
            raise Singular("nu is a root of the invariant")
    num = ctx.E(-2 * nu) ** (a * b)
    return (num * ((ca ** b) * (cb ** a)).inverse()).to_f()


# topological Jordan decomposition

def tjd_exponent(n: int) -> int:
    return math.lcm(*range(1, 4 * n + 1))


def is_strongly_compact(x: SymPoint) -> bool:
    f = char_poly(x.mat)
    return all(c.is_integral() for c in f.c) and f.c[0].val == 0


def is_residually_unipotent(M: EMatrix) -> bool:
    f = char_poly(M)
    one = EPoly(M.ctx, [-1, 1]) ** M.rows
    return all((a - b).val >= 1 for a, b in zip(f.c, one.c))


class _IntRep:
    """Regular representation of an integral E-matrix over Z/p^M."""

    def __init__(self, ctx: PrecisionContext, M: int):
        self.ctx = ctx
        self.mod = ctx.p**M
        self.M = M

    def encode(self, X: EMatrix) -> np.ndarray:
        n = X.rows
        out = np.zeros((2 * n, 2 * n), dtype=object)
        e = self.ctx.eps
        for i, row in enumerate(X.int_rows(self.M)):
            for j, (a, b) in enumerate(row):
                out[2 * i, 2 * j] = a
                out[2 * i, 2 * j + 1] = e * b % self.mod
                out[2 * i + 1, 2 * j] = b
                out[2 * i + 1, 2 * j + 1] = a
        return out

    def decode(self, A: np.ndarray) -> EMatrix:
        n = A.shape[0] // 2
        E = self.ctx.E
        return EMatrix(self.ctx, [[E(int(A[2 * i, 2 * j]), int(A[2 * i + 1, 2 * j])) for j in range(n)]
                                  for i in range(n)])

    def mul(self, A, B):
        return (A @ B) % self.mod

    def power(self, A, k: int):
        out = np.identity(A.shape[0], dtype=object)
        while k:
            if k & 1:
                out = self.mul(out, A)
            A = self.mul(A, A)
            k >>= 1
        return out

    @staticmethod
    def key(A) -> tuple:
        return tuple(int(v) for v in A.flat)


@dataclass(frozen=True)
class TJDecomposition:
    x_as: SymPoint
    x_tu: SymPoint
    l: int
    iters: int
    period: int

    def to_json(self) -> dict:
        return {"x_as": self.x_as.to_json(), "x_tu": self.x_tu.to_json(), "l": self.l,
                "iters": self.iters, "period": self.period}


def _periodic_limit(step, key, w0, cap: int):
    """w_j = step^j(w0) until a repeat w_j = w_i; return (w_k with i <= k < j, k = 0 mod (j - i), j, j - i)."""
    seen = {}
    ws = []
    w = w0
    for j in range(cap + 1):
        k = key(w)
        if k in seen:
            i = seen[k]
            r = j - i
            kk = i + (-i) % r
            return ws[kk], j, r
        seen[k] = j
        ws.append(w)
        w = step(w)
    raise NonConvergence(f"no periodic regime within {cap} p-power steps")


def stable_lattice(M: EMatrix, cap: int = 64) -> Lattice:
    """The lattice sum of M^k O^n over k >= 0, for M in a compact subgroup."""
    ctx = M.ctx
    L = hnf(EMatrix.identity(ctx, M.rows))
    for _ in range(cap):
        B = L.basis
        L2 = hnf(EMatrix.from_blocks([[B, M @ B]]))
        if L2 == L:
            return L
        L = L2
    raise NotStronglyCompact("powers of the matrix are unbounded")


def tjd(x: SymPoint) -> TJDecomposition:
    if not is_strongly_compact(x):
        raise NotStronglyCompact("characteristic polynomial is not integral with unit constant term")
    ctx = x.ctx
    p = ctx.p
    l = tjd_exponent(x.n)
    cap = 4 * ctx.R + 2 * l
    # in a basis of an x-stable lattice the power walk is exact integer arithmetic
    y, Bm = _integral_model(x.mat)
    rep = _IntRep(ctx, ctx.R)
    lim, iters, r = _periodic_limit(lambda A: rep.power(A, p), rep.key, rep.encode(y), cap)
    x_as = rep.decode(lim)
    if Bm is not None:
        x_as = Bm @ x_as @ Bm.inv()
    if l % r:
        raise NonConvergence(f"period {r} does not divide l = {l}")
    xa = SymPoint(x_as, x.forms)
    x_tu = adjoint_W(x_as, x.forms) @ x.mat
    return TJDecomposition(xa, SymPoint(x_tu, x.forms), l, iters, r)


def fixed_by_power(x: SymPoint, l: int | None = None) -> bool:
    """x^(p^l) = x, evaluated exactly mod p^N in the basis of an x-stable lattice."""
    ctx = x.ctx
    l = tjd_exponent(x.n) if l is None else l
    y = _integral_model(x.mat)[0]
    rep = _IntRep(ctx, ctx.N)
    A = rep.encode(y)
    B = A
    for _ in range(l):
        B = rep.power(B, ctx.p)
    return _IntRep.key(A) == _IntRep.key(B)


def _integral_model(M: EMatrix):
    """(B^-1 M B, B) with B a basis of an M-stable lattice, or (M, None) if M is integral."""
    if M.is_integral():
        return M, None
    B = stable_lattice(M).basis
    return B.inv() @ M @ B, B


def check_tjd(x: SymPoint, t: TJDecomposition) -> dict:
    a, u = t.x_as.mat, t.x_tu.mat
    return {
        "commute": (a @ u).is_close(u @ a),
        "reassemble": (a @ u).is_close(x.mat),
        "fixed": fixed_by_power(t.x_as, t.l),
        "unipotent": is_residually_unipotent(u),
        "member_as": is_member(a, x.forms),
        "member_tu": is_member(u, x.forms),
    }


# descent along gamma with gamma^2 = 1

def _root_multiplicity(f: EPoly, nu: int, prec: int) -> int:
    ctx = f.ctx
    lin = EPoly(ctx, [-nu, 1])
    m = 0
    while f.degree > 0:
        q, r = f.divmod(lin)
        if any(c.val < prec for c in r.c):
            break
        f = q
        m += 1
    return m


def _residue_multiplicity(f: EPoly, nu: int) -> int:
    """Multiplicity of nu as a root of f mod p."""
    ctx = f.ctx
    p = ctx.p
    cs = [c.residue() for c in f.c]
    m = 0
    while len(cs) > 1:
        # synthetic division by (t - nu) over the residue field
        out = [cs[-1]]
        for c in reversed(cs[:-1]):
            out.append(_fadd(c, _fmul(out[-1], nu % p, p), p))
        rem = out.pop()
        if rem != (0, 0):
            break
        cs = list(reversed(out))
        m += 1
    return m


def _fadd(a, b, p):
    return ((a[0] + b[0]) % p, (a[1] + b[1]) % p)


def _fmul(a, k, p):
    return ((a[0] * k) % p, (a[1] * k) % p)


def eigenvalue_restriction(x_as: EMatrix, nu: int) -> bool:
    """Every eigenvalue of x_as with residue nu equals nu to full precision."""
    f = char_poly(x_as)
    return _root_multiplicity(f, nu, x_as.ctx.cmp_prec) == _residue_multiplicity(f, nu)


def _unit_minor(cols: list[list], ctx) -> bool:
    n, k = len(cols[0]), len(cols)
    for rows in itertools.combinations(range(n), k):
        m = EMatrix(ctx, [[cols[j][i] for j in range(k)] for i in rows])
        if m.det().val == 0:
            return True
    return False


def summand_basis(P: EMatrix) -> EMatrix:
    """An O-basis (as columns) of P O^n for an integral idempotent P."""
    ctx = P.ctx
    chosen = []
    for j in range(P.cols):
        c = P.col(j)
        if _unit_minor(chosen + [c], ctx):
            chosen.append(c)
    if not chosen:
        return EMatrix.zeros(ctx, P.rows, 0)
    return EMatrix(ctx, [[c[i] for c in chosen] for i in range(P.rows)])


def _normalized(U: EMatrix, G: EMatrix) -> tuple[EMatrix, HermForm]:
    """U T with (U T)^dagger G (U T) = diag(1, ..., 1, p^c)."""
    ctx = U.ctx
    k = U.cols
    Pn, c = herm_normalize(U.dagger() @ G @ U)
    form = HermForm.nonsplit(ctx, k) if c else HermForm.split(ctx, k)
    return U @ Pn.dagger(), form


@dataclass(frozen=True)
class DescentData:
    gamma: SymPoint
    y: SymPoint
    proj: dict  # nu -> idempotent onto W_nu
    comps: dict  # nu -> component SymPoint (y_1 and -y_{-1}) or None
    bases: dict  # nu -> (U1, U2)
    eigen_ok: bool

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma.to_json(),
            "y": self.y.to_json(),
            "proj": {str(k): v.to_json() for k, v in self.proj.items()},
            "components": {str(k): (v.to_json() if v is not None else None) for k, v in self.comps.items()},
            "eigen_ok": self.eigen_ok,
        }


def _restrict(x: SymPoint, U1: EMatrix, U2: EMatrix, f1: HermForm, f2: HermForm) -> SymPoint:
    G = EMatrix.block_diag(x.forms[0].gram, x.forms[1].gram)
    U = EMatrix.block_diag(U1, U2)
    Gc = EMatrix.block_diag(f1.gram, f2.gram)
    return SymPoint(Gc.inv() @ U.dagger() @ G @ x.mat @ U, (f1, f2))


def descent_data(x: SymPoint) -> DescentData:
    ctx = x.ctx
    n = x.n
    if not x.mat.is_integral():
        raise NotIntegral("descent is applied to integral points")
    t = tjd(x)
    xas = t.x_as.mat
    ok = eigenvalue_restriction(xas, 1) and eigenvalue_restriction(xas, -1)
    if not ok:
        raise NotInDescentLocus("an eigenvalue of x_as is congruent to +-1 without being equal to it")
    f = char_poly(xas)
    m = _root_multiplicity(f, -1, ctx.cmp_prec)
    I = EMatrix.identity(ctx, 2 * n)
    if m == 0:
        P = EMatrix.zeros(ctx, 2 * n, 2 * n)
    elif m == 2 * n:
        P = I
    else:
        g = f
        for _ in range(m):
            g, _r = g.divmod(EPoly(ctx, [1, 1]))
        g1 = g(-1)
        if g1.val != 0:
            raise PrecisionExhausted("eigenvalue clusters at -1 are not separated")
        P = g.eval_matrix(xas) * g1.inverse()
    gamma = I - P * ctx.E(2)
    y = SymPoint(gamma @ x.mat, x.forms)
    proj = {1: I - P, -1: P}
    comps, bases = {}, {}
    for nu, Q in proj.items():
        Q1, _, _, Q2 = Q.blocks(n)
        U1, U2 = summand_basis(Q1), summand_basis(Q2)
        if U1.cols != U2.cols:
            raise NotInDescentLocus("eigenspace halves have different ranks")
        if U1.cols == 0:
            comps[nu], bases[nu] = None, None
            continue
        U1, f1 = _normalized(U1, x.forms[0].gram)
        U2, f2 = _normalized(U2, x.forms[1].gram)
        # the component of x on W_nu is y_1 for nu = 1 and -y_{-1} for nu = -1
        comps[nu] = _restrict(x, U1, U2, f1, f2)
        bases[nu] = (U1, U2)
    return DescentData(SymPoint(gamma, x.forms), y, proj, comps, bases, ok)


__all__ = [
    "cayley", "cayley_matrix", "cayley_inv", "cayley_charpoly_transform", "cab_factor",
    "TJDecomposition", "tjd", "tjd_exponent", "is_strongly_compact", "is_residually_unipotent",
    "fixed_by_power", "check_tjd", "DescentData", "descent_data", "eigenvalue_restriction",
    "summand_basis",
]
