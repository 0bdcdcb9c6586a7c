"""Orbital integrals of the unit element as lattice-pair counts.

With the torus H_x and K = U(Lambda) x U(Lambda) both of volume one,
Orb(x, 1) = sum over h in H/K with h^-1 x h integral of [H_x : H_x cap hKh^-1] / ...,
which telescopes into #{h K : h^-1 x h in G(O)}.  Since U(V) permutes the
self-dual lattices transitively with stabilizer U(Lambda), that set is
{(L1, L2) self-dual : x (L1 + L2) <= L1 + L2}.

Group side: x = [[A, B], [-B^*, D]] stabilizes L1 + L2 iff A L1 <= L1,
B^* L1 <= L2 <= B^-1 L1 = (B^* L1)^v, and D L2 <= L2.
Lie side: delta = [[0, X], [-X^*, 0]] stabilizes it iff X^* L1 <= L2 <= X^-1 L1.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .endoscopy import (
    EndoDatum, OrbitInvariant, factor_data, kappa, lie_stable_reps, orbit_invariant,
    orbit_invariant_lie, stable_orbit_reps,
)
from .errors import LevelTooSmall, NotElliptic, WindowTooSmall
from .lattice import enumerate_self_dual, lattices_between, stabilizes, touches_window, window_stable
from .matalg import EMatrix, EPoly, discriminant, herm_normalize
from .padic import norm_preimage
from .symspace import LiePoint, SymPoint, chi, chi_lie, is_integral

log = logging.getLogger(__name__)

MAX_WINDOW_GROWTH = 3


@dataclass(frozen=True)
class OrbitalResult:
    count: int
    window: int
    saturated: bool

    def to_json(self) -> dict:
        return {"count": self.count, "window": self.window, "saturated": self.saturated}


@dataclass(frozen=True)
class KappaOrbitalResult:
    value: int
    breakdown: list = field(default_factory=list)  # (OrbitInvariant, sign, OrbitalResult)

    def to_json(self) -> dict:
        return {"value": self.value,
                "breakdown": [{"inv": inv.to_json(), "sign": s, **r.to_json()} for inv, s, r in self.breakdown]}


def default_window(f: EPoly) -> int:
    """Window from the valuations of the invariant polynomial.

    A coefficient of negative valuation d pushes stable lattices out to p^-d;
    a discriminant of valuation v allows lattices at distance about v/4."""
    d = max(0, -min((c.val for c in f.c), default=0))
    if f.degree >= 2:
        disc = discriminant(f)
        if disc.v is not None:
            d = max(d, disc.v // 4)
    return max(1, d) + 1


def _check_elliptic(y: EMatrix):
    if y.rows <= 2 and not factor_data(y).elliptic:
        raise NotElliptic("the centralizer torus is not compact")


def _pairs(y: EMatrix, forms, inner_of, outer_of, pred2, W: int):
    f1, f2 = forms
    for L1 in window_stable(y, enumerate_self_dual(f1, W), W):
        B1 = L1.basis
        for L2 in lattices_between(inner_of(B1), outer_of(B1), f2, pred2):
            yield L1, L2


def _count(y: EMatrix, forms, inner_of, outer_of, pred2, W: int, strict: bool) -> OrbitalResult:
    touched = False
    count = 0
    for L1, L2 in _pairs(y, forms, inner_of, outer_of, pred2, W):
        count += 1
        if touches_window(L1, W) or touches_window(L2, W):
            touched = True
    if touched and strict:
        raise WindowTooSmall(f"a stabilized pair touches the window W={W}", count, W)
    return OrbitalResult(count, W, not touched)


def _with_growth(run, W: int | None, f: EPoly, strict: bool) -> OrbitalResult:
    if W is not None:
        return run(W, strict)
    W0 = default_window(f)
    for W in range(W0, W0 + MAX_WINDOW_GROWTH + 1):
        try:
            return run(W, True)
        except WindowTooSmall:
            log.debug("window %d too small, growing", W)
    if strict:
        raise WindowTooSmall(f"window growth exhausted at W={W}")
    return run(W, False)


def orbit_integral_unit(x: SymPoint, W: int | None = None, strict: bool = True) -> OrbitalResult:
    _check_elliptic(x.A)
    Bs = x.Bstar
    Binv = x.B.inv()
    D = x.D

    def run(W, strict):
        return _count(x.A, x.forms, lambda B1: Bs @ B1, lambda B1: Binv @ B1,
                      lambda L: stabilizes(D, L), W, strict)

    return _with_growth(run, W, chi(x), strict)


def orbit_integral_unit_lie(d: LiePoint, W: int | None = None, strict: bool = True) -> OrbitalResult:
    y = d.r()
    _check_elliptic(y)
    Xs = d.Xstar
    Xinv = d.X.inv()

    def run(W, strict):
        return _count(y, d.forms, lambda B1: Xs @ B1, lambda B1: Xinv @ B1, None, W, strict)

    return _with_growth(run, W, chi_lie(d), strict)


def _orthonormal_basis(L, phi) -> EMatrix:
    B = L.basis
    P, c = herm_normalize(B.dagger() @ phi.gram @ B)
    if c:
        raise ValueError("lattice is not self-dual")
    return B @ P.dagger()


def integral_representative(x: SymPoint, W: int | None = None) -> SymPoint | None:
    """A conjugate h^-1 x h (h in H(F)) with integral entries, or None if the orbit meets no integral point.

    h carries the standard lattices onto a stabilized self-dual pair (L1, L2)."""
    if any(f.label != "split" for f in x.forms):
        raise ValueError("integral representatives are built for split forms")
    if W is None:
        W = orbit_integral_unit(x).window
    Bs, Binv, D = x.Bstar, x.B.inv(), x.D
    for L1, L2 in _pairs(x.A, x.forms, lambda B1: Bs @ B1, lambda B1: Binv @ B1,
                         lambda L: stabilizes(D, L), W):
        H = EMatrix.block_diag(_orthonormal_basis(L1, x.forms[0]), _orthonormal_basis(L2, x.forms[1]))
        return SymPoint(H.inv() @ x.mat @ H, x.forms)
    return None


def _chi_b_default(fd, datum: EndoDatum):
    # any assignment of b roots gives the same kappa on the kernel for n <= 2
    ctx = fd.factors[0].poly.ctx
    f = EPoly(ctx, [1])
    for fac in fd.factors[len(fd.factors) - datum.b:]:
        f = f * fac.poly
    return f


def kappa_orbital(x: SymPoint, datum: EndoDatum, W: int | None = None, chi_b: EPoly | None = None
                  ) -> KappaOrbitalResult:
    fd = factor_data(x.A)
    if chi_b is None and datum.a and datum.b:
        chi_b = _chi_b_default(fd, datum)
    rows = []
    value = 0
    for xr in stable_orbit_reps(x):
        inv = orbit_invariant(x, xr) if fd.split else OrbitInvariant(())
        k = kappa(datum, fd, inv, chi_b) if fd.split else 1
        r = orbit_integral_unit(xr, W)
        rows.append((inv, k, r))
        value += k * r.count
    return KappaOrbitalResult(value, rows)


def kappa_orbital_lie(d: LiePoint, datum: EndoDatum, W: int | None = None, chi_b: EPoly | None = None
                      ) -> KappaOrbitalResult:
    fd = factor_data(d.r())
    if chi_b is None and datum.a and datum.b:
        chi_b = _chi_b_default(fd, datum)
    rows = []
    value = 0
    for dr in lie_stable_reps(d):
        inv = orbit_invariant_lie(d, dr) if fd.split else OrbitInvariant(())
        k = kappa(datum, fd, inv, chi_b) if fd.split else 1
        r = orbit_integral_unit_lie(dr, W)
        rows.append((inv, k, r))
        value += k * r.count
    return KappaOrbitalResult(value, rows)


def stable_orbital(xa: SymPoint | None, xb: SymPoint | None, W: int | None = None) -> int:
    total = 1
    for x in (xa, xb):
        if x is None:
            continue
        total *= sum(orbit_integral_unit(xr, W).count for xr in stable_orbit_reps(x))
    return total


def stable_orbital_lie(da: LiePoint | None, db: LiePoint | None, W: int | None = None) -> int:
    total = 1
    for d in (da, db):
        if d is None:
            continue
        total *= sum(orbit_integral_unit_lie(dr, W).count for dr in lie_stable_reps(d))
    return total


# independent check: Iwasawa coordinates on U(1,1)

def hyperbolic_frame(ctx) -> tuple[EMatrix, EMatrix]:
    """Q with Q^dagger Q = [[0, 1], [1, 0]] and Q in GL_2(O_E)."""
    u0 = norm_preimage(ctx.F(-1))
    half = ctx.F(2).inverse()
    Q = EMatrix(ctx, [[1, half], [u0, -u0 * half]])
    return Q, Q.inv()


def iwasawa_cosets(ctx, level: int):
    """(m, t, h, h^-1) for h = Q n(w t) a(m) Q^-1 over representatives of
    U(V_2)/U(Lambda) with |m| <= level and val(t) >= -level."""
    p = ctx.p
    Q, Qi = hyperbolic_frame(ctx)
    w = ctx.omega
    out = []
    for m in range(-level, level + 1):
        a = EMatrix.diag(ctx, [ctx.F(p) ** m, ctx.F(p) ** (-m)])
        ai = EMatrix.diag(ctx, [ctx.F(p) ** (-m), ctx.F(p) ** m])
        span = 2 * m + level
        ts = [0] if span <= 0 else range(p**span)
        for j in ts:
            t = ctx.F(j) * ctx.F(p) ** (-level) if j else ctx.F(0)
            nmat = EMatrix(ctx, [[1, w * t], [0, 1]])
            nimat = EMatrix(ctx, [[1, -(w * t)], [0, 1]])
            # inverted factorwise: h has entries of size p^(-2 level) and a unit determinant
            out.append((m, t, Q @ nmat @ a @ Qi, Q @ ai @ nimat @ Qi))
    return out


def oracle_double_coset(x: SymPoint, level: int) -> int:
    """Count of cosets hK, h in H(F) truncated at ``level``, with h^-1 x h integral.

    H = U(V_n) x U(V_n) with split forms; for n = 1 the group is compact.  For
    n = 2 cosets are listed in Iwasawa coordinates h = n(s) a(m) in a
    hyperbolic frame.  A counted coset on the truncation boundary raises
    LevelTooSmall."""
    n = x.n
    if any(f.label != "split" for f in x.forms):
        raise ValueError("oracle handles split forms only")
    if n == 1:
        return 1 if is_integral(x) else 0
    if n != 2:
        raise ValueError("oracle handles n <= 2")
    ctx = x.ctx
    A, B, Bm, D = x.mat.blocks(2)
    invs = iwasawa_cosets(ctx, level)

    def edge(m, t):
        return abs(m) == level or (t.v is not None and t.v == -level)

    good1 = [(m, t, h, hi) for (m, t, h, hi) in invs if (hi @ A @ h).is_integral()]
    count = 0
    for m1, t1, h1, h1i in good1:
        h1iB = h1i @ B
        Bmh1 = Bm @ h1
        for m2, t2, h2, h2i in invs:
            if not (h1iB @ h2).is_integral():
                continue
            if not (h2i @ Bmh1).is_integral():
                continue
            if not (h2i @ D @ h2).is_integral():
                continue
            if edge(m1, t1) or edge(m2, t2):
                raise LevelTooSmall(f"a counted coset lies on the boundary of level {level}")
            count += 1
    return count


__all__ = [
    "OrbitalResult", "KappaOrbitalResult", "default_window", "orbit_integral_unit",
    "orbit_integral_unit_lie", "kappa_orbital", "kappa_orbital_lie", "stable_orbital",
    "stable_orbital_lie", "oracle_double_coset", "integral_representative", "iwasawa_cosets",
]
