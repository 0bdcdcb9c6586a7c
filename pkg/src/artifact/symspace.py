"""The symmetric space Q_n inside U(W), W = W_1 + W_2, and its tangent model.

Conventions: eps = diag(I, -I), s(g) = g eps g^* eps, so s(1) = I is the base
point.  A point is x = [[A, B], [-B^*, D]] with B : W_2 -> W_1 and
B^* = Phi_2^-1 B^dagger Phi_1.  R(x) = A.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import Degenerate, NoFactorization, NoLift, NotIntegral, PrecisionExhausted
from .lattice import HermForm
from .matalg import EMatrix, EPoly, char_poly, discriminant, herm_isometry
from .padic import PrecisionContext


def eps_matrix(ctx: PrecisionContext, n: int, m: int | None = None) -> EMatrix:
    m = n if m is None else m
    return EMatrix.diag(ctx, [1] * n + [-1] * m)


def total_gram(forms: tuple[HermForm, HermForm]) -> EMatrix:
    return EMatrix.block_diag(forms[0].gram, forms[1].gram)


def adjoint_W(M: EMatrix, forms) -> EMatrix:
    G = total_gram(forms)
    return G.inv() @ M.dagger() @ G


def split_forms(ctx, n: int) -> tuple[HermForm, HermForm]:
    return (HermForm.split(ctx, n), HermForm.split(ctx, n))


@dataclass(frozen=True)
class InvariantPoint:
    chi: EPoly

    def to_json(self):
        return self.chi.to_json()


@dataclass(frozen=True, eq=False)
class SymPoint:
    mat: EMatrix
    forms: tuple[HermForm, HermForm]
    A: EMatrix = field(init=False, repr=False)
    B: EMatrix = field(init=False, repr=False)
    D: EMatrix = field(init=False, repr=False)

    def __post_init__(self):
        n = self.forms[0].n
        A, B, _, D = self.mat.blocks(n)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "D", D)

    @property
    def n(self) -> int:
        return self.forms[0].n

    @property
    def ctx(self) -> PrecisionContext:
        return self.mat.ctx

    @property
    def Bstar(self) -> EMatrix:
        return self.forms[0].adjoint(self.B, self.forms[1])

    def __neg__(self) -> SymPoint:
        return SymPoint(-self.mat, self.forms)

    def conj_by(self, h: EMatrix) -> SymPoint:
        """h x h^-1."""
        return SymPoint(h @ self.mat @ h.inv(), self.forms)

    def to_json(self) -> dict:
        return {"n": self.n, "forms": [f.label for f in self.forms], "mat": self.mat.to_json()}

    @classmethod
    def from_json(cls, ctx, d) -> SymPoint:
        n = d["n"]
        forms = tuple(HermForm.of_label(ctx, n, lab) for lab in d["forms"])
        return cls(EMatrix.from_json(ctx, d["mat"]), forms)


def is_member(M: EMatrix, forms=None, slack: int | None = None) -> bool:
    ctx = M.ctx
    if M.rows != M.cols or M.rows % 2:
        return False
    n = M.rows // 2
    forms = split_forms(ctx, n) if forms is None else forms
    I = EMatrix.identity(ctx, 2 * n)
    if not (adjoint_W(M, forms) @ M).is_close(I, slack):
        return False
    eM = eps_matrix(ctx, n) @ M
    if not (eM @ eM).is_close(I, slack):
        return False
    t = eM.trace()
    return t.v is None or t.v >= ctx.N - (ctx.slack if slack is None else slack)


def symmetrize(g: EMatrix, forms=None) -> SymPoint:
    """s(g) = g eps g^* eps."""
    ctx = g.ctx
    n = g.rows // 2
    forms = split_forms(ctx, n) if forms is None else forms
    e = eps_matrix(ctx, n)
    return SymPoint(g @ e @ adjoint_W(g, forms) @ e, forms)


def contraction(x: SymPoint) -> EMatrix:
    return x.A


def chi(x: SymPoint) -> EPoly:
    return char_poly(x.A)


def invariant(x: SymPoint) -> InvariantPoint:
    return InvariantPoint(chi(x))


def car_from_chi(c: InvariantPoint | EPoly) -> EPoly:
    """det(t^2 I - 2 t A + I) = sum_k chi_k (t^2 + 1)^k (2t)^(n-k)."""
    f = c.chi if isinstance(c, InvariantPoint) else c
    ctx = f.ctx
    n = f.degree
    q = EPoly(ctx, [1, 0, 1])
    two_t = EPoly(ctx, [0, 2])
    out = EPoly(ctx, [0])
    for k, a in enumerate(f.c):
        out = out + (q ** k) * (two_t ** (n - k)) * a
    return out


def _nonzero(z, ctx) -> bool:
    return z.v is not None and z.v < ctx.cmp_prec


def is_rss(x: SymPoint) -> bool:
    ctx = x.ctx
    f = chi(x)
    d = discriminant(f)
    if d.v is None:
        return False
    if d.v >= ctx.cmp_prec:
        raise PrecisionExhausted("discriminant indeterminate at working precision")
    return _nonzero(f(1), ctx) and _nonzero(f(-1), ctx) and _nonzero(x.B.det(), ctx)


def is_integral(x: SymPoint) -> bool:
    return x.mat.is_integral()


def locus(x: SymPoint, nu: int) -> str:
    if not is_integral(x):
        raise NotIntegral("locus is defined on integral points")
    v = chi(x)(nu).v
    return "very_regular" if v == 0 else "not_very_regular"


def lift_from_herm(A: EMatrix, forms=None) -> SymPoint:
    """A point x with R(x) = A: B solves B Phi_2^-1 B^dagger = (I - A^2) Phi_1^-1, D = B^-1 A B."""
    ctx = A.ctx
    n = A.rows
    forms = split_forms(ctx, n) if forms is None else forms
    f1, f2 = forms
    I = EMatrix.identity(ctx, n)
    H = (I - A @ A) @ f1.gram.inv()
    dH = H.det()
    if dH.v is None or dH.v >= ctx.cmp_prec:
        raise Degenerate("I - A^2 is singular")
    try:
        B = herm_isometry(f2.gram.inv(), H)
    except NoFactorization as exc:
        raise NoLift("discriminant class of I - A^2 does not match the forms") from exc
    D = B.inv() @ A @ B
    Bs = f1.adjoint(B, f2)
    return SymPoint(EMatrix.from_blocks([[A, B], [-Bs, D]]), forms)


@dataclass(frozen=True, eq=False)
class LiePoint:
    """delta = [[0, X], [-X^*, 0]] in the -1 eigenspace of Ad(eps) on u(W)."""

    X: EMatrix
    forms: tuple[HermForm, HermForm]

    @property
    def n(self) -> int:
        return self.forms[0].n

    @property
    def ctx(self):
        return self.X.ctx

    @property
    def Xstar(self) -> EMatrix:
        return self.forms[0].adjoint(self.X, self.forms[1])

    def delta(self) -> EMatrix:
        Z = EMatrix.zeros(self.ctx, self.n, self.n)
        return EMatrix.from_blocks([[Z, self.X], [-self.Xstar, Z]])

    def r(self) -> EMatrix:
        return -(self.X @ self.Xstar)

    def conj_by(self, h1: EMatrix, h2: EMatrix) -> LiePoint:
        return LiePoint(h1 @ self.X @ h2.inv(), self.forms)

    def to_json(self) -> dict:
        return {"n": self.n, "forms": [f.label for f in self.forms], "X": self.X.to_json()}

    @classmethod
    def from_json(cls, ctx, d) -> LiePoint:
        n = d["n"]
        forms = tuple(HermForm.of_label(ctx, n, lab) for lab in d["forms"])
        return cls(EMatrix.from_json(ctx, d["X"]), forms)

    @classmethod
    def from_delta(cls, delta: EMatrix, forms=None) -> LiePoint:
        n = delta.rows // 2
        forms = split_forms(delta.ctx, n) if forms is None else forms
        return cls(delta.sub(0, n, n, 2 * n), forms)


def chi_lie(d: LiePoint) -> EPoly:
    return char_poly(d.r())


def is_rss_lie(d: LiePoint) -> bool:
    ctx = d.ctx
    f = chi_lie(d)
    disc = discriminant(f)
    if disc.v is None:
        return False
    if disc.v >= ctx.cmp_prec:
        raise PrecisionExhausted("discriminant indeterminate at working precision")
    return _nonzero(d.X.det(), ctx)
