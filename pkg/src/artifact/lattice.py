"""O_E-lattices in Hermitian spaces (E^n, Phi).

A lattice is stored through its column Hermite normal form: an upper
triangular basis whose j-th column is p^f_j e_j plus entries above the
diagonal reduced to base-p digits (x + y w, 0 <= x, y < p^f_i). Internally we
keep the integral matrix p^denom * basis as exact integer pairs.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Callable, Iterator

from .errors import RankDeficient, WindowTooLarge
from .matalg import EMatrix
from .padic import PrecisionContext

Pair = tuple[int, int]
Cols = tuple[tuple[Pair, ...], ...]

DEFAULT_BUDGET = 10**6


def _pv(z: Pair, p: int, cap: int) -> int:
    x, y = z
    if x == 0 and y == 0:
        return cap
    v = 0
    while x % p == 0 and y % p == 0 and v < cap:
        x //= p
        y //= p
        v += 1
    return v


def _pmul(a: Pair, b: Pair, eps: int) -> Pair:
    return (a[0] * b[0] + eps * a[1] * b[1], a[0] * b[1] + a[1] * b[0])


@dataclass(frozen=True)
class HermForm:
    n: int
    gram: EMatrix
    label: str

    @classmethod
    def split(cls, ctx: PrecisionContext, n: int) -> HermForm:
        return cls(n, EMatrix.identity(ctx, n), "split")

    @classmethod
    def nonsplit(cls, ctx: PrecisionContext, n: int) -> HermForm:
        return cls(n, EMatrix.diag(ctx, [1] * (n - 1) + [ctx.p]), "nonsplit")

    @classmethod
    def of_label(cls, ctx, n: int, label: str) -> HermForm:
        return cls.split(ctx, n) if label == "split" else cls.nonsplit(ctx, n)

    @property
    def ctx(self) -> PrecisionContext:
        return self.gram.ctx

    def adjoint(self, M: EMatrix, other: HermForm | None = None) -> EMatrix:
        """M^* for M: (E^m, other) -> (E^n, self), i.e. other^-1 M^dagger self."""
        other = self if other is None else other
        return other.gram.inv() @ M.dagger() @ self.gram

    def to_json(self) -> dict:
        return {"n": self.n, "label": self.label, "gram": self.gram.to_json()}


class Lattice:
    """Full-rank O_E-submodule of E^n in canonical column HNF."""

    __slots__ = ("ctx", "n", "denom", "cols", "_basis")

    def __init__(self, ctx: PrecisionContext, n: int, denom: int, cols: Cols):
        self.ctx = ctx
        self.n = n
        self.denom = denom
        self.cols = cols
        self._basis = None

    @classmethod
    def _canon(cls, ctx, n: int, k: int, cols) -> Lattice:
        p = ctx.p
        cols = [list(c) for c in cols]
        while k > 0 and all(x % p == 0 and y % p == 0 for c in cols for (x, y) in c):
            cols = [[(x // p, y // p) for (x, y) in c] for c in cols]
            k -= 1
        return cls(ctx, n, k, tuple(tuple(c) for c in cols))

    @classmethod
    def standard(cls, ctx, n: int) -> Lattice:
        return cls(ctx, n, 0, tuple(tuple((1 if i == j else 0, 0) for i in range(n)) for j in range(n)))

    @property
    def exps(self) -> tuple[int, ...]:
        """Exponents of the diagonal of p^denom * basis."""
        return tuple(_pv(self.cols[j][j], self.ctx.p, 10**6) for j in range(self.n))

    @property
    def basis(self) -> EMatrix:
        if self._basis is None:
            ctx = self.ctx
            s = ctx.F(ctx.p) ** (-self.denom)
            self._basis = EMatrix(ctx, [[ctx.E(*self.cols[j][i]) * s for j in range(self.n)]
                                        for i in range(self.n)])
        return self._basis

    @property
    def key(self):
        return (self.n, self.denom, self.cols)

    def __eq__(self, o):
        return isinstance(o, Lattice) and self.ctx.p == o.ctx.p and self.key == o.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, o):
        return self.key < o.key

    def __repr__(self):
        return f"Lattice(n={self.n}, denom={self.denom}, cols={self.cols})"

    def scaled(self, k: int) -> Lattice:
        """p^k L."""
        p = self.ctx.p
        if k >= 0:
            m = p**k
            cols = [[(x * m, y * m) for (x, y) in c] for c in self.cols]
            return Lattice._canon(self.ctx, self.n, self.denom, cols)
        return Lattice._canon(self.ctx, self.n, self.denom - k, self.cols)

    def contains(self, v) -> bool:
        """Membership by back-substitution in the triangular basis."""
        ctx = self.ctx
        p = ctx.p
        s = ctx.F(p) ** self.denom
        w = [z * s for z in v]
        if any(z.v is not None and z.v < 0 for z in w):
            return False
        R = ctx.R
        mod = p**R
        w = [z.int_pair(R) for z in w]
        for i in reversed(range(self.n)):
            e = _pv(self.cols[i][i], p, R)
            x, y = w[i]
            x %= mod
            y %= mod
            if _pv((x, y), p, R) < e:
                return False
            q = (x // p**e, y // p**e)
            col = self.cols[i]
            w = [((a - qa) % mod, (b - qb) % mod) for (a, b), (qa, qb) in
                 zip(w, (_pmul(q, c, ctx.eps) for c in col))]
        return True

    def window_cols(self, W: int) -> list[list[Pair]]:
        """Columns of p^W L, as integer pairs; requires denom <= W."""
        m = self.ctx.p ** (W - self.denom)
        return [[(x * m, y * m) for (x, y) in c] for c in self.cols]

    def to_json(self) -> dict:
        return {"n": self.n, "denom": self.denom, "basis": self.basis.to_json()}

    @classmethod
    def from_json(cls, ctx, d) -> Lattice:
        return hnf(EMatrix.from_json(ctx, d["basis"]))


def _hnf_cols(gens: list[list[Pair]], n: int, p: int, eps: int, R: int) -> list[list[Pair]]:
    """Canonical upper triangular HNF of the module spanned by gens plus p^R O^n."""
    mod = p**R
    work = [[(x % mod, y % mod) for (x, y) in g] for g in gens]
    out: list = [None] * n
    for i in reversed(range(n)):
        best, bv = None, R
        for idx, c in enumerate(work):
            v = _pv(c[i], p, R) if c[i] != (0, 0) else R
            if v < bv:
                best, bv = idx, v
        if best is None:
            raise RankDeficient("lattice rank deficient at working precision")
        c = work.pop(best)
        pe = p**bv
        x, y = c[i]
        ux, uy = x // pe, y // pe
        ninv = pow((ux * ux - eps * uy * uy) % mod, -1, mod)
        uinv = (ux * ninv % mod, (-uy) * ninv % mod)
        c = [(a % mod, b % mod) for (a, b) in (_pmul(uinv, z, eps) for z in c)]
        c[i] = (pe, 0)
        for k, o in enumerate(work):
            ox, oy = o[i]
            if ox == 0 and oy == 0:
                continue
            q = (ox // pe, oy // pe)
            work[k] = [((a - qa) % mod, (b - qb) % mod) for (a, b), (qa, qb) in
                       zip(o, (_pmul(q, z, eps) for z in c))]
            work[k][i] = (0, 0)
        out[i] = c
    # reduce entries above the diagonal to canonical digit ranges
    for j in range(n):
        for i in reversed(range(j)):
            pe = out[i][i][0]
            x, y = out[j][i]
            q = (x // pe, y // pe)
            if q != (0, 0):
                out[j] = [((a - qa) % mod, (b - qb) % mod) for (a, b), (qa, qb) in
                          zip(out[j], (_pmul(q, z, eps) for z in out[i]))]
    return out


def hnf(generators: EMatrix) -> Lattice:
    """Canonical lattice spanned by the columns of ``generators``."""
    ctx = generators.ctx
    n = generators.rows
    if generators.cols < n:
        raise RankDeficient("fewer generators than the rank")
    k = max(0, -generators.min_val())
    s = ctx.F(ctx.p) ** k
    R = ctx.R
    gens = [[(z * s).int_pair(R) for z in generators.col(j)] for j in range(generators.cols)]
    cols = _hnf_cols(gens, n, ctx.p, ctx.eps, R)
    if any(_pv(cols[j][j], ctx.p, R) >= ctx.N for j in range(n)):
        raise RankDeficient("pivot beyond working precision")
    return Lattice._canon(ctx, n, k, cols)


def dual(L: Lattice, phi: HermForm) -> Lattice:
    """L^v = {v : <v, L> in O_E} = (B^dagger Phi)^-1 O_E^n."""
    return hnf((L.basis.dagger() @ phi.gram).inv())


def gram(L: Lattice, phi: HermForm) -> EMatrix:
    B = L.basis
    return B.dagger() @ phi.gram @ B


def is_self_dual(L: Lattice, phi: HermForm) -> bool:
    G = gram(L, phi)
    return G.is_integral() and G.det().v == 0


def stabilizes(M: EMatrix, L: Lattice) -> bool:
    img = M @ L.basis
    return all(L.contains(img.col(j)) for j in range(L.n))


def _compositions(total: int, n: int, cap: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        if total == 0:
            yield ()
        return
    for e in range(min(total, cap) + 1):
        for rest in _compositions(total - e, n - 1, cap):
            yield (e,) + rest


class _Budget:
    __slots__ = ("left",)

    def __init__(self, n: int):
        self.left = n

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise WindowTooLarge("enumeration budget exhausted")


def isotropic_hnfs(phi: list[list[Pair]], M: int, target: int, emax: int, p: int, eps: int,
                   budget: _Budget) -> list[Cols]:
    """Upper triangular C (diag p^e, sum e = target, entries in canonical digit range)
    with C^dagger phi C = 0 mod p^M.  Returned as tuples of columns."""
    n = len(phi)
    mod = p**M
    vphi = min((_pv(z, p, M) for row in phi for z in row), default=M)
    out = []

    def mat_mul(A, B):
        return [[_sum_pairs((_pmul(A[i][k], B[k][j], eps) for k in range(n)), mod) for j in range(n)]
                for i in range(n)]

    def ok(C, t, unknown, final):
        Ch = [[(C[j][i][0], -C[j][i][1]) for j in range(n)] for i in range(n)]  # conjugate transpose
        A = mat_mul(Ch, phi)
        G = mat_mul(A, C)
        PC = mat_mul(phi, C) if not final else None
        for j in range(n):
            for l in range(j, n):
                km = M
                if not final:
                    uj = [i for (i, jj) in unknown if jj == j]
                    ul = [i for (i, ll) in unknown if ll == l]
                    for i in uj:
                        km = min(km, t + _pv(PC[i][l], p, M))
                    for i in ul:
                        km = min(km, t + _pv(A[j][i], p, M))
                    if uj and ul:
                        km = min(km, 2 * t + vphi)
                if km <= 0:
                    continue
                m = p**km
                x, y = G[j][l]
                if x % m or y % m:
                    return False
        return True

    for e in _compositions(target, n, emax):
        C = [[(0, 0)] * n for _ in range(n)]
        for j in range(n):
            C[j][j] = (p ** e[j], 0)
        U = [(i, j) for j in range(n) for i in range(j) if e[i] > 0]
        depth = max((e[i] for i, _ in U), default=0)

        def rec(t):
            budget.spend()
            if t == depth:
                if ok(C, t, [], True):
                    out.append(tuple(tuple(C[i][j] for i in range(n)) for j in range(n)))
                return
            active = [(i, j) for (i, j) in U if e[i] > t]
            unknown_next = [(i, j) for (i, j) in U if e[i] > t + 1]
            pt = p**t
            base = {ij: C[ij[0]][ij[1]] for ij in active}
            for digits in product(range(p * p), repeat=len(active)):
                for (i, j), d in zip(active, digits):
                    bx, by = base[(i, j)]
                    C[i][j] = (bx + (d % p) * pt, by + (d // p) * pt)
                if ok(C, t + 1, unknown_next, False):
                    rec(t + 1)
            for ij in active:
                C[ij[0]][ij[1]] = base[ij]

        rec(0)
    return out


def _sum_pairs(it, mod: int) -> Pair:
    x = y = 0
    for a, b in it:
        x += a
        y += b
    return (x % mod, y % mod)


def _phi_ints(phi: HermForm, R: int) -> list[list[Pair]]:
    if not phi.gram.is_integral():
        raise ValueError("window enumeration needs an integral Gram matrix")
    return phi.gram.int_rows(R)


_MEMO: dict = {}
_CACHE_DIR: Path | None = Path(os.environ["ARTIFACT_CACHE_DIR"]) if os.environ.get("ARTIFACT_CACHE_DIR") else None


def set_cache_dir(path) -> None:
    global _CACHE_DIR
    _CACHE_DIR = Path(path) if path else None


def _cache_key(phi: HermForm, W: int) -> str:
    ctx = phi.ctx
    blob = json.dumps({"p": ctx.p, "N": ctx.N, "phi": phi.gram.to_json(), "W": W}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:32]


def enumerate_self_dual(phi: HermForm, W: int, budget: int = DEFAULT_BUDGET) -> list[Lattice]:
    """Self-dual L with p^W Lambda <= L <= p^-W Lambda, sorted canonically."""
    if W < 0:
        raise ValueError("window must be nonnegative")
    ctx = phi.ctx
    key = _cache_key(phi, W)
    if key in _MEMO:
        return _MEMO[key]
    lats = None
    path = _CACHE_DIR / f"{key}.json" if _CACHE_DIR else None
    if path is not None and path.exists():
        raw = json.loads(path.read_text())
        lats = [Lattice(ctx, phi.n, d, tuple(tuple(tuple(z) for z in c) for c in cols)) for d, cols in raw]
    if lats is None:
        n = phi.n
        vdet = phi.gram.det().v
        if vdet % 2:
            lats = []
        else:
            M = 2 * W
            target = n * W - vdet // 2
            cs = isotropic_hnfs(_phi_ints(phi, M + 1), M, target, M, ctx.p, ctx.eps, _Budget(budget))
            lats = sorted({Lattice._canon(ctx, n, W, c) for c in cs})
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps([[L.denom, L.cols] for L in lats]))
    _MEMO[key] = lats
    return lats


def lattices_between(inner: EMatrix, outer: EMatrix, phi: HermForm,
                     pred: Callable[[Lattice], bool] | None = None,
                     budget: int = DEFAULT_BUDGET) -> list[Lattice]:
    """Self-dual lattices L with span(inner) <= L <= span(outer) = span(inner)^v."""
    ctx = outer.ctx
    Pinv = outer.inv()
    S = Pinv @ inner
    if not S.is_integral():
        raise ValueError("inner lattice is not contained in the outer one")
    d = S.det().v
    if d is None:
        raise RankDeficient("inner lattice is degenerate")
    if d % 2:
        return []
    G0 = outer.dagger() @ phi.gram @ outer
    K = max(0, -G0.min_val())
    Gs = G0 * ctx.F(ctx.p) ** K
    cs = isotropic_hnfs(Gs.int_rows(K + 1), K, d // 2, d, ctx.p, ctx.eps, _Budget(budget))
    out = []
    for c in cs:
        C = EMatrix(ctx, [[ctx.E(*c[j][i]) for j in range(len(c))] for i in range(len(c))])
        L = hnf(outer @ C)
        if pred is None or pred(L):
            out.append(L)
    return sorted(out)


def window_stable(M: EMatrix, lats: list[Lattice], W: int) -> list[Lattice]:
    """Those lattices of a window-W family that M maps into themselves.

    Works modulo p^(2W) in coordinates p^W L, which is exact because every
    lattice in the family contains p^W Lambda."""
    ctx = M.ctx
    p, eps = ctx.p, ctx.eps
    m = max(0, -M.min_val())
    if m == float("inf"):
        m = 0
    Mi = (M * ctx.F(p) ** m).int_rows(2 * W + m)
    mod_m = p ** (2 * W + m)
    mod = p ** (2 * W)
    pm = p**m
    n = M.rows
    out = []
    for L in lats:
        C = L.window_cols(W)
        es = [_pv(C[i][i], p, 2 * W) if C[i][i] != (0, 0) else 2 * W for i in range(n)]
        good = True
        for j in range(n):
            w = []
            for i in range(n):
                x, y = _sum_pairs((_pmul(Mi[i][k], C[j][k], eps) for k in range(n)), mod_m)
                if x % pm or y % pm:
                    good = False
                    break
                w.append(((x // pm) % mod, (y // pm) % mod))
            if not good:
                break
            for i in reversed(range(n)):
                x, y = w[i]
                e = es[i]
                pe = p**e
                if x % pe or y % pe:
                    good = False
                    break
                q = (x // pe, y // pe)
                if q != (0, 0):
                    w = [((a - qa) % mod, (b - qb) % mod) for (a, b), (qa, qb) in
                         zip(w, (_pmul(q, z, eps) for z in C[i]))]
            if not good:
                break
        if good:
            out.append(L)
    return out


def touches_window(L: Lattice, W: int) -> bool:
    """A self-dual lattice of the window-W family that is not inside window W-1."""
    return L.denom >= W
