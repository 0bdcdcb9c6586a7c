"""Elliptic relative endoscopic data, rational classes in a stable class, kappa and transfer factors.

Rational orbits inside a stable class are labelled by eigenline norm classes:
for each F-rational root r of chi, the parity of val<v, v> for an eigenvector
v of R(x) at r.  For an unramified E/F this parity is the whole of
F^x / Nm(E^x), so the class vector is the torus cohomology class.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import NoFactorization, NoLift, NotStablyConjugate, PartitionMismatch, UnsupportedDegree
from .lattice import HermForm
from .matalg import EMatrix, EPoly, char_poly, herm_isometry, kernel_vector, quadratic_roots, resultant
from .padic import FScalar, eta, norm_preimage
from .symspace import LiePoint, SymPoint, chi, chi_lie, lift_from_herm, split_forms


@dataclass(frozen=True)
class EndoDatum:
    a: int
    b: int
    alpha: str = "split"
    beta: str = "split"

    @property
    def n(self) -> int:
        return self.a + self.b

    @property
    def ramified(self) -> bool:
        return (self.alpha, self.beta) != ("split", "split")

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "alpha": self.alpha, "beta": self.beta}

    @classmethod
    def from_json(cls, d) -> EndoDatum:
        return cls(d["a"], d["b"], d["alpha"], d["beta"])


@dataclass(frozen=True)
class Factor:
    degree: int
    poly: EPoly
    root: FScalar | None
    in_S1: bool
    kind: str  # "linear", "ramified" or "unramified"


@dataclass(frozen=True)
class FactorData:
    factors: tuple[Factor, ...]

    @property
    def roots(self) -> list[FScalar]:
        return [f.root for f in self.factors if f.root is not None]

    @property
    def elliptic(self) -> bool:
        return all(f.in_S1 for f in self.factors)

    @property
    def split(self) -> bool:
        return all(f.degree == 1 for f in self.factors)


@dataclass(frozen=True)
class OrbitInvariant:
    bits: tuple[int, ...]

    def __add__(self, o: OrbitInvariant) -> OrbitInvariant:
        return OrbitInvariant(tuple((a + b) % 2 for a, b in zip(self.bits, o.bits)))

    def to_json(self):
        return list(self.bits)


@dataclass(frozen=True)
class TransferFactor:
    sign: int
    qexp: int

    def value(self, q: int):
        from fractions import Fraction
        return Fraction(self.sign) * Fraction(q) ** self.qexp

    def __mul__(self, o: TransferFactor) -> TransferFactor:
        return TransferFactor(self.sign * o.sign, self.qexp + o.qexp)

    def to_json(self) -> dict:
        return {"sign": self.sign, "qexp": self.qexp}


def _f_poly(f: EPoly) -> EPoly:
    if not f.in_F():
        raise ValueError("polynomial does not have coefficients in F")
    return EPoly(f.ctx, [f.ctx.E(c.to_f()) for c in f.c])


def factor_data_poly(f: EPoly) -> FactorData:
    f = _f_poly(f)
    ctx = f.ctx
    if f.degree == 0:
        return FactorData(())
    if f.degree == 1:
        r = (-f.c[0]).to_f()
        return FactorData((Factor(1, f, r, True, "linear"),))
    if f.degree == 2:
        roots = quadratic_roots(f, "F")
        if roots:
            return FactorData(tuple(Factor(1, EPoly.from_roots(ctx, [r]), r, True, "linear") for r in roots))
        disc = (f.c[1] * f.c[1] - f.c[0] * 4).to_f()
        ram = disc.v % 2 == 1
        return FactorData((Factor(2, f, None, ram, "ramified" if ram else "unramified"),))
    raise UnsupportedDegree("factorization beyond degree 2 is out of scope")


def factor_data(A: EMatrix) -> FactorData:
    return factor_data_poly(char_poly(A))


def eigenline_norm_class(A: EMatrix, root, phi: HermForm | None = None) -> int:
    ctx = A.ctx
    n = A.rows
    G = EMatrix.identity(ctx, n) if phi is None else phi.gram
    v = kernel_vector(A - EMatrix.identity(ctx, n) * ctx.E(root))
    s = ctx.E(0)
    for i in range(n):
        for j in range(n):
            s = s + v[i].conj() * G[i, j] * v[j]
    return s.v % 2


def _herm_invariant(A: EMatrix, A2: EMatrix, phi: HermForm | None = None) -> OrbitInvariant:
    f1, f2 = char_poly(A), char_poly(A2)
    if not f1.is_close(f2):
        raise NotStablyConjugate("invariant polynomials differ")
    fd = factor_data_poly(f1)
    if not fd.split:
        raise UnsupportedDegree("orbit invariants need chi split over F")
    return OrbitInvariant(tuple((eigenline_norm_class(A2, r, phi) - eigenline_norm_class(A, r, phi)) % 2
                                for r in fd.roots))


def orbit_invariant(x: SymPoint, x2: SymPoint) -> OrbitInvariant:
    return _herm_invariant(x.A, x2.A, x.forms[0])


def orbit_invariant_lie(d: LiePoint, d2: LiePoint) -> OrbitInvariant:
    return _herm_invariant(d.r(), d2.r(), d.forms[0])


def _flipped_herm(A: EMatrix, roots) -> EMatrix:
    """Hermitian matrix with the same eigenvalues and the opposite eigenline classes (n = 2)."""
    ctx = A.ctx
    p = ctx.p
    y = norm_preimage(ctx.F(p - 1))
    a1, a2 = (ctx.E(r) for r in roots)
    classes = [eigenline_norm_class(A, r) for r in roots]
    if classes[0]:
        return EMatrix.diag(ctx, [a1, a2])
    # v1 = (1, y), v2 = (-conj y, 1): orthogonal, <v_i, v_i> = p
    v1 = EMatrix(ctx, [[1], [y]])
    v2 = EMatrix(ctx, [[-y.conj()], [1]])
    pinv = ctx.E(p).inverse()
    return (v1 @ v1.dagger() * a1 + v2 @ v2.dagger() * a2) * pinv


def stable_orbit_reps(x: SymPoint) -> list[SymPoint]:
    """One point per rational class in the stable class of x, x itself first."""
    if x.n == 1:
        return [x]
    if x.n > 2:
        raise UnsupportedDegree("stable classes are enumerated for n <= 2")
    fd = factor_data(x.A)
    if not fd.split:
        # one S_1 factor (or none): the kernel of the summation map is trivial
        return [x]
    x2 = lift_from_herm(_flipped_herm(x.A, fd.roots), x.forms)
    return [x, x2]


def lie_lift(y: EMatrix, forms=None) -> LiePoint:
    """A tangent point with r(delta) = y: X Phi_2^-1 X^dagger = -y Phi_1^-1."""
    ctx = y.ctx
    n = y.rows
    forms = split_forms(ctx, n) if forms is None else forms
    try:
        X = herm_isometry(forms[1].gram.inv(), -(y @ forms[0].gram.inv()))
    except NoFactorization as exc:
        raise NoLift("class of -y does not match the forms") from exc
    return LiePoint(X, forms)


def lie_stable_reps(d: LiePoint) -> list[LiePoint]:
    if d.n == 1:
        return [d]
    if d.n > 2:
        raise UnsupportedDegree("stable classes are enumerated for n <= 2")
    y = d.r()
    fd = factor_data(y)
    if not fd.split:
        return [d]
    return [d, lie_lift(_flipped_herm(y, fd.roots), d.forms)]


def assign_b_roots(fd: FactorData, chi_b: EPoly | None) -> list[bool]:
    """For each factor, whether its roots belong to the b-component."""
    if chi_b is None:
        raise PartitionMismatch("the b-component is needed to assign roots")
    marks = []
    used = 0
    for f in fd.factors:
        if f.degree == 1:
            hit = chi_b(f.root).val >= f.poly.ctx.cmp_prec
        else:
            hit = resultant(f.poly, chi_b).val >= f.poly.ctx.cmp_prec
        marks.append(hit)
        used += f.degree if hit else 0
    if used != chi_b.degree:
        raise PartitionMismatch("roots of the b-component are not roots of chi")
    return marks


def kappa(datum: EndoDatum, fd: FactorData, inv: OrbitInvariant, chi_b: EPoly | None = None) -> int:
    if datum.b == 0:
        return 1
    if datum.a == 0:
        marks = [True] * len(fd.factors)
    else:
        marks = assign_b_roots(fd, chi_b)
    s1 = [m for f, m in zip(fd.factors, marks) if f.in_S1]
    if len(s1) != len(inv.bits):
        raise PartitionMismatch("invariant length does not match the S_1 factors")
    return -1 if sum(b for b, m in zip(inv.bits, s1) if m) % 2 else 1


def relative_discriminant(chi_a: EPoly, chi_b: EPoly) -> FScalar:
    return resultant(chi_a, chi_b).to_f()


def _chi_or_one(x, ctx, lie=False) -> EPoly:
    if x is None:
        return EPoly(ctx, [1])
    return chi_lie(x) if lie else chi(x)


def matches(x: SymPoint, xa: SymPoint | None, xb: SymPoint | None) -> bool:
    ctx = x.ctx
    return chi(x).is_close(_chi_or_one(xa, ctx) * _chi_or_one(xb, ctx))


def matches_lie(d: LiePoint, da: LiePoint | None, db: LiePoint | None) -> bool:
    ctx = d.ctx
    return chi_lie(d).is_close(_chi_or_one(da, ctx, True) * _chi_or_one(db, ctx, True))


def _block_herm(parts) -> EMatrix:
    return EMatrix.block_diag(*[m for m in parts if m is not None])


def nice_point(xa: SymPoint | None, xb: SymPoint | None, forms) -> SymPoint:
    return lift_from_herm(_block_herm([xa.A if xa else None, xb.A if xb else None]), forms)


def nice_lie_point(da: LiePoint | None, db: LiePoint | None, forms) -> LiePoint:
    return lie_lift(_block_herm([da.r() if da else None, db.r() if db else None]), forms)


def _tf(D: FScalar, k: int) -> TransferFactor:
    if D.v is None:
        return TransferFactor(0, 0)
    return TransferFactor(eta(D) * k, -D.v)


def transfer_factor(xa: SymPoint | None, xb: SymPoint | None, x: SymPoint, datum: EndoDatum) -> TransferFactor:
    ctx = x.ctx
    if not matches(x, xa, xb):
        return TransferFactor(0, 0)
    ca, cb = _chi_or_one(xa, ctx), _chi_or_one(xb, ctx)
    D = relative_discriminant(ca, cb)
    k = 1
    if x.n >= 2 and datum.a and datum.b:
        xn = nice_point(xa, xb, x.forms)
        inv = orbit_invariant(xn, x)
        k = kappa(datum, factor_data(x.A), inv, cb)
    return _tf(D, k)


def lie_transfer_factor(da: LiePoint | None, db: LiePoint | None, d: LiePoint,
                        datum: EndoDatum) -> TransferFactor:
    ctx = d.ctx
    if not matches_lie(d, da, db):
        return TransferFactor(0, 0)
    ca, cb = _chi_or_one(da, ctx, True), _chi_or_one(db, ctx, True)
    D = relative_discriminant(ca, cb)
    k = 1
    if d.n >= 2 and datum.a and datum.b:
        dn = nice_lie_point(da, db, d.forms)
        inv = orbit_invariant_lie(dn, d)
        k = kappa(datum, factor_data(d.r()), inv, cb)
    return _tf(D, k)


__all__ = [
    "EndoDatum", "Factor", "FactorData", "OrbitInvariant", "TransferFactor", "factor_data",
    "factor_data_poly", "eigenline_norm_class", "orbit_invariant", "orbit_invariant_lie",
    "stable_orbit_reps", "lie_stable_reps", "lie_lift", "kappa", "relative_discriminant",
    "matches", "matches_lie", "nice_point", "nice_lie_point", "transfer_factor",
    "lie_transfer_factor", "assign_b_roots",
]
