"""Dense matrices and polynomials over E, plus Hermitian normal forms."""
from __future__ import annotations

from typing import Iterable, Sequence

from .errors import NoFactorization, NotSquarefree, PrecisionExhausted, Singular
from .padic import INF, EScalar, PrecisionContext, hensel_sqrt, is_close, norm_preimage


def _zero(ctx):
    return EScalar(ctx, None, 0, 0)


def _one(ctx):
    return EScalar(ctx, 0, 1, 0)


class EMatrix:
    """Immutable r x c matrix of EScalars."""

    __slots__ = ("ctx", "rows", "cols", "e")

    def __init__(self, ctx: PrecisionContext, entries: Sequence[Sequence]):
        self.ctx = ctx
        self.e = tuple(tuple(z if isinstance(z, EScalar) else ctx.E(z) for z in row) for row in entries)
        self.rows = len(self.e)
        self.cols = len(self.e[0]) if self.rows else 0

    # constructors
    @classmethod
    def identity(cls, ctx, n: int) -> EMatrix:
        one, zero = _one(ctx), _zero(ctx)
        return cls(ctx, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, ctx, r: int, c: int) -> EMatrix:
        zero = _zero(ctx)
        return cls(ctx, [[zero] * c for _ in range(r)])

    @classmethod
    def diag(cls, ctx, vals: Iterable) -> EMatrix:
        vals = [ctx.E(v) if not isinstance(v, EScalar) else v for v in vals]
        zero = _zero(ctx)
        n = len(vals)
        return cls(ctx, [[vals[i] if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def from_ints(cls, ctx, rows) -> EMatrix:
        """Entries given as ints, Fractions, FScalars or (x, y) pairs meaning x + y w."""
        def conv(z):
            if isinstance(z, tuple):
                return ctx.E(*z)
            return ctx.E(z)
        return cls(ctx, [[conv(z) for z in row] for row in rows])

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[EMatrix]]) -> EMatrix:
        ctx = blocks[0][0].ctx
        out = []
        for brow in blocks:
            for i in range(brow[0].rows):
                out.append([z for b in brow for z in b.e[i]])
        return cls(ctx, out)

    @classmethod
    def block_diag(cls, *mats: EMatrix) -> EMatrix:
        mats = [m for m in mats if m.rows]
        ctx = mats[0].ctx
        r, c = sum(m.rows for m in mats), sum(m.cols for m in mats)
        zero = _zero(ctx)
        out = [[zero] * c for _ in range(r)]
        oi = oj = 0
        for m in mats:
            for i in range(m.rows):
                for j in range(m.cols):
                    out[oi + i][oj + j] = m.e[i][j]
            oi += m.rows
            oj += m.cols
        return cls(ctx, out)

    # access
    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.e[i][j]

    def col(self, j: int) -> list:
        return [row[j] for row in self.e]

    def sub(self, r0: int, r1: int, c0: int, c1: int) -> EMatrix:
        return EMatrix(self.ctx, [row[c0:c1] for row in self.e[r0:r1]])

    def blocks(self, n: int):
        """(A, B, C, D) for the 2x2 block split at index n."""
        m = self.rows
        return (self.sub(0, n, 0, n), self.sub(0, n, n, m), self.sub(n, m, 0, n), self.sub(n, m, n, m))

    def map(self, f) -> EMatrix:
        return EMatrix(self.ctx, [[f(z) for z in row] for row in self.e])

    # arithmetic
    def __add__(self, o: EMatrix) -> EMatrix:
        return EMatrix(self.ctx, [[a + b for a, b in zip(r, s)] for r, s in zip(self.e, o.e)])

    def __sub__(self, o: EMatrix) -> EMatrix:
        return EMatrix(self.ctx, [[a - b for a, b in zip(r, s)] for r, s in zip(self.e, o.e)])

    def __neg__(self) -> EMatrix:
        return self.map(lambda z: -z)

    def __mul__(self, c) -> EMatrix:
        if isinstance(c, EMatrix):
            return self @ c
        c = self.ctx.E(c) if not isinstance(c, EScalar) else c
        return self.map(lambda z: z * c)

    __rmul__ = __mul__

    def __matmul__(self, o: EMatrix) -> EMatrix:
        if self.cols != o.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {o.shape}")
        ocols = list(zip(*o.e))
        zero = _zero(self.ctx)
        out = []
        for row in self.e:
            r = []
            for col in ocols:
                s = zero
                for a, b in zip(row, col):
                    if a.v is not None and b.v is not None:
                        s = s + a * b
                r.append(s)
            out.append(r)
        return EMatrix(self.ctx, out)

    def __pow__(self, k: int) -> EMatrix:
        if k < 0:
            return self.inv() ** (-k)
        r = EMatrix.identity(self.ctx, self.rows)
        b = self
        while k:
            if k & 1:
                r = r @ b
            b = b @ b
            k >>= 1
        return r

    def __eq__(self, o) -> bool:
        return isinstance(o, EMatrix) and self.e == o.e

    def __hash__(self):
        return hash(self.e)

    def __repr__(self):
        return "EMatrix(" + "; ".join(", ".join(map(repr, r)) for r in self.e) + ")"

    def dagger(self) -> EMatrix:
        return EMatrix(self.ctx, [[self.e[i][j].conj() for i in range(self.rows)] for j in range(self.cols)])

    @property
    def T(self) -> EMatrix:
        return EMatrix(self.ctx, list(zip(*self.e)))

    def trace(self) -> EScalar:
        s = _zero(self.ctx)
        for i in range(min(self.rows, self.cols)):
            s = s + self.e[i][i]
        return s

    def min_val(self):
        return min((z.val for row in self.e for z in row), default=INF)

    def is_integral(self) -> bool:
        return all(z.v is None or z.v >= 0 for row in self.e for z in row)

    def is_zero(self, slack: int | None = None) -> bool:
        s = self.ctx.slack if slack is None else slack
        return all(z.val >= self.ctx.N - s for row in self.e for z in row)

    def is_close(self, o: EMatrix, slack: int | None = None) -> bool:
        """Entrywise closeness at precision N - slack, relative to the overall scale."""
        if self.shape != o.shape:
            return False
        s = self.ctx.slack if slack is None else slack
        ref = min(0, self.min_val(), o.min_val())
        bound = self.ctx.N - s + ref
        return all((a - b).val >= bound for r, t in zip(self.e, o.e) for a, b in zip(r, t))

    def det(self) -> EScalar:
        n = self.rows
        if n != self.cols:
            raise ValueError("det of non-square matrix")
        m = [list(r) for r in self.e]
        d = _one(self.ctx)
        for k in range(n):
            piv = min(range(k, n), key=lambda i: m[i][k].val)
            if m[piv][k].v is None:
                return _zero(self.ctx)
            if piv != k:
                m[k], m[piv] = m[piv], m[k]
                d = -d
            pk = m[k][k]
            d = d * pk
            inv = pk.inverse()
            for i in range(k + 1, n):
                if m[i][k].v is None:
                    continue
                c = m[i][k] * inv
                m[i] = [a - c * b if j > k else a for j, (a, b) in enumerate(zip(m[i], m[k]))]
        return d

    def inv(self) -> EMatrix:
        n = self.rows
        if n != self.cols:
            raise ValueError("inverse of non-square matrix")
        ctx = self.ctx
        one, zero = _one(ctx), _zero(ctx)
        m = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(self.e)]
        floor = ctx.N - ctx.slack + min(0, self.min_val())
        for k in range(n):
            piv = min(range(k, n), key=lambda i: m[i][k].val)
            pk = m[piv][k]
            if pk.v is None or pk.v >= floor:
                raise Singular("matrix is singular at working precision")
            m[k], m[piv] = m[piv], m[k]
            inv = pk.inverse()
            m[k] = [z * inv for z in m[k]]
            for i in range(n):
                if i != k and m[i][k].v is not None:
                    c = m[i][k]
                    m[i] = [a - c * b for a, b in zip(m[i], m[k])]
        return EMatrix(ctx, [r[n:] for r in m])

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": [z.to_json() for r in self.e for z in r]}

    @classmethod
    def from_json(cls, ctx, d) -> EMatrix:
        flat = [EScalar.from_json(ctx, z) for z in d["entries"]]
        c = d["cols"]
        return cls(ctx, [flat[i * c:(i + 1) * c] for i in range(d["rows"])])

    def int_rows(self, R: int) -> list[list[tuple[int, int]]]:
        return [[z.int_pair(R) for z in row] for row in self.e]


def dagger(M: EMatrix) -> EMatrix:
    return M.dagger()


def is_hermitian(M: EMatrix, slack: int | None = None) -> bool:
    return M.rows == M.cols and M.is_close(M.dagger(), slack)


def adjugate(M: EMatrix) -> EMatrix:
    n = M.rows
    ctx = M.ctx
    if n == 1:
        return EMatrix.identity(ctx, 1)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = EMatrix(ctx, [[M.e[r][c] for c in range(n) if c != j] for r in range(n) if r != i])
            d = minor.det()
            out[j][i] = d if (i + j) % 2 == 0 else -d
    return EMatrix(ctx, out)


def kernel_vector(M: EMatrix) -> list[EScalar]:
    """A nonzero vector spanning the kernel of a corank-one square matrix."""
    adj = adjugate(M)
    j = min(range(M.cols), key=lambda c: min(z.val for z in adj.col(c)))
    return adj.col(j)


class EPoly:
    """Dense polynomial over E, coefficients stored lowest degree first."""

    __slots__ = ("ctx", "c")

    def __init__(self, ctx: PrecisionContext, coeffs: Sequence):
        c = [z if isinstance(z, EScalar) else ctx.E(z) for z in coeffs]
        while len(c) > 1 and c[-1].v is None:
            c.pop()
        if not c:
            c = [_zero(ctx)]
        self.ctx = ctx
        self.c = tuple(c)

    @classmethod
    def from_roots(cls, ctx, roots) -> EPoly:
        f = cls(ctx, [1])
        for r in roots:
            f = f * cls(ctx, [-ctx.E(r) if not isinstance(r, EScalar) else -r, 1])
        return f

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    @property
    def monic(self) -> bool:
        return self.c[-1] == _one(self.ctx)

    def __call__(self, z) -> EScalar:
        z = self.ctx.E(z) if not isinstance(z, EScalar) else z
        r = _zero(self.ctx)
        for a in reversed(self.c):
            r = r * z + a
        return r

    def eval_matrix(self, M: EMatrix) -> EMatrix:
        n = M.rows
        r = EMatrix.zeros(self.ctx, n, n)
        I = EMatrix.identity(self.ctx, n)
        for a in reversed(self.c):
            r = r @ M + I * a
        return r

    def __add__(self, o: EPoly) -> EPoly:
        n = max(len(self.c), len(o.c))
        z = _zero(self.ctx)
        return EPoly(self.ctx, [(self.c[i] if i < len(self.c) else z) + (o.c[i] if i < len(o.c) else z)
                                for i in range(n)])

    def __neg__(self) -> EPoly:
        return EPoly(self.ctx, [-a for a in self.c])

    def __sub__(self, o: EPoly) -> EPoly:
        return self + (-o)

    def __mul__(self, o) -> EPoly:
        if not isinstance(o, EPoly):
            o = EPoly(self.ctx, [o])
        out = [_zero(self.ctx)] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            if a.v is None:
                continue
            for j, b in enumerate(o.c):
                out[i + j] = out[i + j] + a * b
        return EPoly(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> EPoly:
        r = EPoly(self.ctx, [1])
        for _ in range(k):
            r = r * self
        return r

    def derivative(self) -> EPoly:
        return EPoly(self.ctx, [a * i for i, a in enumerate(self.c)][1:] or [0])

    def divmod(self, g: EPoly) -> tuple[EPoly, EPoly]:
        """Division by a polynomial with unit-or-any nonzero leading coefficient."""
        r = list(self.c)
        dg = g.degree
        if dg < 0 or g.c[-1].v is None:
            raise ZeroDivisionError("division by zero polynomial")
        lead_inv = g.c[-1].inverse()
        q = [_zero(self.ctx)] * max(1, len(r) - dg)
        for k in range(len(r) - 1 - dg, -1, -1):
            c = r[k + dg] * lead_inv
            q[k] = c
            for j, b in enumerate(g.c):
                r[k + j] = r[k + j] - c * b
        return EPoly(self.ctx, q), EPoly(self.ctx, r[:dg] or [0])

    def __eq__(self, o) -> bool:
        return isinstance(o, EPoly) and self.c == o.c

    def __hash__(self):
        return hash(self.c)

    def is_close(self, o: EPoly, slack: int | None = None) -> bool:
        n = max(len(self.c), len(o.c))
        z = _zero(self.ctx)
        a = list(self.c) + [z] * (n - len(self.c))
        b = list(o.c) + [z] * (n - len(o.c))
        return all(is_close(x, y, slack) for x, y in zip(a, b))

    def in_F(self) -> bool:
        return all(a.in_F() for a in self.c)

    def __repr__(self):
        return "EPoly(" + ", ".join(map(repr, self.c)) + ")"

    def to_json(self) -> list:
        return [a.to_json() for a in self.c]

    @classmethod
    def from_json(cls, ctx, d) -> EPoly:
        return cls(ctx, [EScalar.from_json(ctx, z) for z in d])


def _berkowitz(m: list[list[EScalar]], one, zero) -> list[EScalar]:
    n = len(m)
    if n == 0:
        return [one]
    if n == 1:
        return [one, -m[0][0]]
    a = m[0][0]
    R = m[0][1:]
    A = [row[1:] for row in m[1:]]
    vec = [row[0] for row in m[1:]]
    col = [one, -a]
    for _ in range(n - 1):
        s = zero
        for r, v in zip(R, vec):
            s = s + r * v
        col.append(-s)
        nxt = []
        for row in A:
            t = zero
            for r, v in zip(row, vec):
                t = t + r * v
            nxt.append(t)
        vec = nxt
    sub = _berkowitz(A, one, zero)
    out = []
    for i in range(n + 1):
        s = zero
        for j in range(min(i + 1, n)):
            s = s + col[i - j] * sub[j]
        out.append(s)
    return out


def char_poly(M: EMatrix) -> EPoly:
    """det(tI - M), computed division-free."""
    ctx = M.ctx
    hi = _berkowitz([list(r) for r in M.e], _one(ctx), _zero(ctx))
    return EPoly(ctx, list(reversed(hi)))


def companion(f: EPoly) -> EMatrix:
    ctx = f.ctx
    m = f.degree
    zero, one = _zero(ctx), _one(ctx)
    rows = [[zero] * m for _ in range(m)]
    for i in range(1, m):
        rows[i][i - 1] = one
    for i in range(m):
        rows[i][m - 1] = -f.c[i]
    return EMatrix(ctx, rows)


def resultant(f: EPoly, g: EPoly) -> EScalar:
    """prod over roots r of the monic f of g(r), as det g(C_f)."""
    if not f.monic:
        raise ValueError("resultant expects a monic first argument")
    if f.degree == 0:
        return _one(f.ctx)
    return g.eval_matrix(companion(f)).det()


def discriminant(f: EPoly) -> EScalar:
    n = f.degree
    r = resultant(f, f.derivative())
    return -r if (n * (n - 1) // 2) % 2 else r


def quadratic_roots(f: EPoly, target: str = "F") -> list:
    if f.degree != 2 or not f.monic:
        raise ValueError("expects a monic quadratic")
    ctx = f.ctx
    c0, c1 = f.c[0].to_f(), f.c[1].to_f()
    disc = c1 * c1 - c0 * 4
    if disc.v is None or disc.v >= ctx.cmp_prec:
        raise NotSquarefree("discriminant vanishes at working precision")
    half = ctx.F(2).inverse()
    r = hensel_sqrt(disc)
    if r is not None:
        roots = [(-c1 + r) * half, (-c1 - r) * half]
        return roots if target == "F" else [ctx.E(z) for z in roots]
    if target == "F":
        return []
    s = hensel_sqrt(ctx.E(disc))
    if s is None:
        return []
    mc1 = -ctx.E(c1)
    return [(mc1 + s) * half, (mc1 - s) * half]


def _gram(P: list[list[EScalar]], H: EMatrix) -> list[list[EScalar]]:
    M = EMatrix(H.ctx, P)
    return [list(r) for r in (M @ H @ M.dagger()).e]


def herm_normalize(H: EMatrix) -> tuple[EMatrix, int]:
    """P with P H P^dagger = diag(1, ..., 1, p^c), c in {0, 1}."""
    ctx = H.ctx
    n = H.rows
    one, zero = _one(ctx), _zero(ctx)
    P = [[one if i == j else zero for j in range(n)] for i in range(n)]

    def add_row(i, j, lam):
        P[i] = [a + lam * b for a, b in zip(P[i], P[j])]

    for k in range(n):
        G = _gram(P, H)
        dmin = min(G[i][i].val for i in range(k, n))
        off = [(G[i][j].val, i, j) for i in range(k, n) for j in range(i + 1, n)]
        if off and min(off)[0] < dmin:
            ov, i, j = min(off)
            for lam in (one, ctx.omega):
                trial = [a + lam * b for a, b in zip(P[i], P[j])]
                g = _gram([trial], H)[0][0]
                if g.val == ov:
                    P[i] = trial
                    break
            else:
                raise AssertionError("no off-diagonal pivot repair found")
            G = _gram(P, H)
        piv = min(range(k, n), key=lambda i: G[i][i].val)
        if G[piv][piv].v is None or G[piv][piv].v >= ctx.cmp_prec + min(0, H.min_val()):
            raise PrecisionExhausted("degenerate Hermitian form at working precision")
        P[k], P[piv] = P[piv], P[k]
        G = _gram(P, H)
        inv = G[k][k].inverse()
        for j in range(k + 1, n):
            if G[j][k].v is not None:
                add_row(j, k, -(G[j][k] * inv))

    G = _gram(P, H)
    odd = []
    for i in range(n):
        d = G[i][i].to_f()
        par = d.v % 2
        c = norm_preimage(ctx.F(ctx.p if par else 1) / d)
        P[i] = [c * z for z in P[i]]
        if par:
            odd.append(i)
    if len(odd) >= 2:
        y = norm_preimage(ctx.F(ctx.p - 1))
        yb = y.conj()
        pinv = ctx.E(ctx.p).inverse()
        while len(odd) >= 2:
            i, j = odd.pop(), odd.pop()
            ri, rj = P[i], P[j]
            P[i] = [(a + y * b) * pinv for a, b in zip(ri, rj)]
            P[j] = [(-yb * a + b) * pinv for a, b in zip(ri, rj)]
    c = 0
    if odd:
        i = odd[0]
        P.append(P.pop(i))
        c = 1
    return EMatrix(ctx, P), c


def herm_factor(H: EMatrix) -> EMatrix:
    """B with B B^dagger = H; raises NoFactorization when val det H is odd."""
    P, c = herm_normalize(H)
    if c:
        raise NoFactorization("odd determinant valuation")
    return P.inv()


def herm_isometry(G: EMatrix, H: EMatrix) -> EMatrix:
    """B with B G B^dagger = H for Hermitian forms of equal rank and class."""
    PG, cG = herm_normalize(G)
    PH, cH = herm_normalize(H)
    if cG != cH:
        raise NoFactorization("forms lie in different classes")
    return PH.inv() @ PG
