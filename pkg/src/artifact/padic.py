"""Truncated p-adic scalars for F = Q_p and its unramified quadratic extension E = F(w), w^2 = eps.

Elements are stored in floating form p^v * u with u a unit mod p^R, where
R = N + guard. Cancellation in a sum shifts the unit and loses low digits; the
guard digits absorb that loss, equality is judged mod p^N and ``is_close``
compares at N - slack.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import PrecisionExhausted, ZeroArgument

INF = math.inf


def _ival(k: int, p: int) -> int:
    """p-adic valuation of a nonzero int."""
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return v


def _least_nonresidue(p: int) -> int:
    for e in range(2, p):
        if pow(e, (p - 1) // 2, p) == p - 1:
            return e
    raise ValueError(f"no non-residue mod {p}")


class PrecisionContext:
    """Prime, working precision and the fixed non-residue eps."""

    __slots__ = ("p", "N", "slack", "eps", "R", "pN", "_pows", "_pNN")

    def __init__(self, p: int, N: int = 12, slack: int = 2, guard: int | None = None):
        if p < 3 or p % 2 == 0 or any(p % d == 0 for d in range(3, int(p**0.5) + 1, 2)):
            raise ValueError(f"p must be an odd prime, got {p}")
        if N < 8:
            raise ValueError("N must be at least 8")
        self.p = p
        self.N = N
        self.slack = slack
        self.eps = _least_nonresidue(p)
        # arithmetic runs mod p^R with R = N + guard; equality is judged mod p^N
        self.R = N + (N if guard is None else guard)
        self.pN = p**self.R
        self._pNN = p**N
        self._pows = [p**k for k in range(4 * self.R + 8)]

    def pw(self, k: int) -> int:
        if k < len(self._pows):
            return self._pows[k]
        return self.p**k

    @property
    def cmp_prec(self) -> int:
        return self.N - self.slack

    def __eq__(self, other):
        return isinstance(other, PrecisionContext) and (self.p, self.N, self.slack) == (
            other.p, other.N, other.slack)

    def __hash__(self):
        return hash((self.p, self.N, self.slack))

    def __repr__(self):
        return f"PrecisionContext(p={self.p}, N={self.N}, slack={self.slack})"

    # constructors
    def F(self, x) -> FScalar:
        if isinstance(x, FScalar):
            return x
        if isinstance(x, EScalar):
            return x.to_f()
        if isinstance(x, int):
            return FScalar._from_int(self, x)
        if isinstance(x, Fraction):
            return FScalar._from_int(self, x.numerator) / FScalar._from_int(self, x.denominator)
        raise TypeError(f"cannot coerce {type(x).__name__} to FScalar")

    def E(self, a=0, b=0) -> EScalar:
        if isinstance(a, EScalar) and b == 0:
            return a
        fa, fb = self.F(a), self.F(b)
        return EScalar._from_parts(self, fa, fb)

    @property
    def omega(self) -> EScalar:
        return EScalar(self, 0, 0, 1)

    def to_json(self) -> dict:
        return {"p": self.p, "N": self.N, "eps": self.eps}

    @classmethod
    def from_json(cls, d: dict, slack: int = 2) -> PrecisionContext:
        ctx = cls(d["p"], d["N"], slack)
        if ctx.eps != d.get("eps", ctx.eps):
            raise ValueError("eps mismatch")
        return ctx


def _digits(u: int, p: int, N: int) -> str:
    out = []
    for _ in range(N):
        u, r = divmod(u, p)
        out.append("0123456789abcdefghijklmnopqrstuvwxyz"[r])
    return "".join(out)


def _undigits(s: str, p: int) -> int:
    return sum(int(c, 36) * p**i for i, c in enumerate(s))


class FScalar:
    """Element of F. ``v is None`` marks the zero sentinel."""

    __slots__ = ("ctx", "v", "u")

    def __init__(self, ctx: PrecisionContext, v, u: int):
        self.ctx = ctx
        self.v = v
        self.u = u

    @classmethod
    def _from_int(cls, ctx, k: int) -> FScalar:
        if k == 0:
            return cls(ctx, None, 0)
        v = _ival(k, ctx.p)
        return cls(ctx, v, (k // ctx.pw(v)) % ctx.pN)

    @classmethod
    def _norm(cls, ctx, v: int, s: int) -> FScalar:
        s %= ctx.pN
        if s == 0:
            return cls(ctx, None, 0)
        k = _ival(s, ctx.p)
        if k:
            s //= ctx.pw(k)
            v += k
        return cls(ctx, v, s)

    def is_zero(self) -> bool:
        return self.v is None

    @property
    def val(self):
        return INF if self.v is None else self.v

    def _coerce(self, o):
        if isinstance(o, FScalar):
            return o
        if isinstance(o, EScalar):
            return NotImplemented
        return self.ctx.F(o)

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        if self.v is None:
            return o
        if o.v is None:
            return self
        ctx = self.ctx
        if self.v == o.v:
            return FScalar._norm(ctx, self.v, self.u + o.u)
        lo, hi = (self, o) if self.v < o.v else (o, self)
        d = hi.v - lo.v
        if d >= ctx.R:
            return lo
        return FScalar(ctx, lo.v, (lo.u + hi.u * ctx.pw(d)) % ctx.pN)

    __radd__ = __add__

    def __neg__(self):
        if self.v is None:
            return self
        return FScalar(self.ctx, self.v, (-self.u) % self.ctx.pN)

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        if self.v is None or o.v is None:
            return FScalar(self.ctx, None, 0)
        return FScalar(self.ctx, self.v + o.v, self.u * o.u % self.ctx.pN)

    __rmul__ = __mul__

    def inverse(self) -> FScalar:
        if self.v is None:
            raise ZeroDivisionError("inverse of zero")
        return FScalar(self.ctx, -self.v, pow(self.u, -1, self.ctx.pN))

    def __truediv__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._coerce(o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if self.v is None:
            return FScalar(self.ctx, 0, 1) if k == 0 else self
        return FScalar(self.ctx, self.v * k, pow(self.u, k, self.ctx.pN))

    def __eq__(self, o):
        if isinstance(o, EScalar):
            return o == self
        try:
            o = self._coerce(o)
        except TypeError:
            return NotImplemented
        return self.v == o.v and (self.u - o.u) % self.ctx._pNN == 0

    def __hash__(self):
        return hash((self.v, self.u % self.ctx._pNN))

    def __repr__(self):
        if self.v is None:
            return "F(0)"
        return f"F({self.p_str()})"

    def p_str(self) -> str:
        return f"{self.ctx.p}^{self.v}*{self.u}" if self.v else str(self.u)

    def is_integral(self) -> bool:
        return self.v is None or self.v >= 0

    def is_unit(self) -> bool:
        return self.v == 0

    def residue(self) -> int:
        if self.v is None or self.v > 0:
            return 0
        if self.v < 0:
            raise ValueError("residue of a non-integral element")
        return self.u % self.ctx.p

    def unit_part(self) -> FScalar:
        if self.v is None:
            raise ZeroArgument("unit part of zero")
        return FScalar(self.ctx, 0, self.u)

    def to_int(self) -> int:
        """Integer representative in [0, p^R) of an integral element."""
        if self.v is None:
            return 0
        if self.v < 0:
            raise ValueError("not integral")
        return self.ctx.pw(self.v) * self.u % self.ctx.pN

    def to_fraction(self) -> Fraction:
        """Rational with the shortest symmetric digit representative."""
        if self.v is None:
            return Fraction(0)
        u = self.u if self.u <= self.ctx.pN // 2 else self.u - self.ctx.pN
        return Fraction(u) * Fraction(self.ctx.p) ** self.v

    def to_json(self) -> dict:
        if self.v is None:
            return {"v": None, "u": ""}
        return {"v": self.v, "u": _digits(self.u, self.ctx.p, self.ctx.R)}

    @classmethod
    def from_json(cls, ctx, d) -> FScalar:
        if d["v"] is None:
            return cls(ctx, None, 0)
        return cls(ctx, d["v"], _undigits(d["u"], ctx.p) % ctx.pN)


class EScalar:
    """Element x + y*w of E, stored as p^v * (x + y w) with (x, y) not both divisible by p."""

    __slots__ = ("ctx", "v", "x", "y")

    def __init__(self, ctx: PrecisionContext, v, x: int, y: int):
        self.ctx = ctx
        self.v = v
        self.x = x
        self.y = y

    @classmethod
    def _norm(cls, ctx, v: int, x: int, y: int) -> EScalar:
        pN = ctx.pN
        x %= pN
        y %= pN
        if x == 0 and y == 0:
            return cls(ctx, None, 0, 0)
        p = ctx.p
        while x % p == 0 and y % p == 0:
            x //= p
            y //= p
            v += 1
        return cls(ctx, v, x, y)

    @classmethod
    def _from_parts(cls, ctx, a: FScalar, b: FScalar) -> EScalar:
        if a.v is None and b.v is None:
            return cls(ctx, None, 0, 0)
        if b.v is None:
            return cls(ctx, a.v, a.u, 0)
        if a.v is None:
            return cls(ctx, b.v, 0, b.u)
        v = min(a.v, b.v)
        return cls._norm(ctx, v, a.u * ctx.pw(a.v - v), b.u * ctx.pw(b.v - v))

    @property
    def a(self) -> FScalar:
        if self.v is None or self.x == 0:
            return FScalar(self.ctx, None, 0)
        return FScalar._norm(self.ctx, self.v, self.x)

    @property
    def b(self) -> FScalar:
        if self.v is None or self.y == 0:
            return FScalar(self.ctx, None, 0)
        return FScalar._norm(self.ctx, self.v, self.y)

    def is_zero(self) -> bool:
        return self.v is None

    @property
    def val(self):
        return INF if self.v is None else self.v

    def _coerce(self, o):
        if isinstance(o, EScalar):
            return o
        if isinstance(o, FScalar):
            if o.v is None:
                return EScalar(self.ctx, None, 0, 0)
            return EScalar(self.ctx, o.v, o.u, 0)
        return self.ctx.E(o)

    def __add__(self, o):
        o = self._coerce(o)
        if self.v is None:
            return o
        if o.v is None:
            return self
        ctx = self.ctx
        if self.v == o.v:
            return EScalar._norm(ctx, self.v, self.x + o.x, self.y + o.y)
        lo, hi = (self, o) if self.v < o.v else (o, self)
        d = hi.v - lo.v
        if d >= ctx.R:
            return lo
        s = ctx.pw(d)
        return EScalar(ctx, lo.v, (lo.x + hi.x * s) % ctx.pN, (lo.y + hi.y * s) % ctx.pN)

    __radd__ = __add__

    def __neg__(self):
        if self.v is None:
            return self
        pN = self.ctx.pN
        return EScalar(self.ctx, self.v, (-self.x) % pN, (-self.y) % pN)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        o = self._coerce(o)
        if self.v is None or o.v is None:
            return EScalar(self.ctx, None, 0, 0)
        ctx = self.ctx
        pN = ctx.pN
        x = (self.x * o.x + ctx.eps * self.y * o.y) % pN
        y = (self.x * o.y + self.y * o.x) % pN
        # a product of units of E is a unit: no renormalization needed
        return EScalar(ctx, self.v + o.v, x, y)

    __rmul__ = __mul__

    def conj(self) -> EScalar:
        if self.v is None:
            return self
        return EScalar(self.ctx, self.v, self.x, (-self.y) % self.ctx.pN)

    def norm(self) -> FScalar:
        if self.v is None:
            return FScalar(self.ctx, None, 0)
        ctx = self.ctx
        return FScalar(ctx, 2 * self.v, (self.x * self.x - ctx.eps * self.y * self.y) % ctx.pN)

    def trace(self) -> FScalar:
        if self.v is None:
            return FScalar(self.ctx, None, 0)
        return FScalar._norm(self.ctx, self.v, 2 * self.x)

    def inverse(self) -> EScalar:
        if self.v is None:
            raise ZeroDivisionError("inverse of zero")
        ctx = self.ctx
        pN = ctx.pN
        ni = pow((self.x * self.x - ctx.eps * self.y * self.y) % pN, -1, pN)
        return EScalar(ctx, -self.v, self.x * ni % pN, (-self.y) * ni % pN)

    def __truediv__(self, o):
        return self * self._coerce(o).inverse()

    def __rtruediv__(self, o):
        return self._coerce(o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        r = EScalar(self.ctx, 0, 1, 0)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, o):
        try:
            o = self._coerce(o)
        except TypeError:
            return NotImplemented
        m = self.ctx._pNN
        return self.v == o.v and (self.x - o.x) % m == 0 and (self.y - o.y) % m == 0

    def __hash__(self):
        m = self.ctx._pNN
        return hash((self.v, self.x % m, self.y % m))

    def __repr__(self):
        if self.v is None:
            return "E(0)"
        return f"E({self.ctx.p}^{self.v}*({self.x}+{self.y}w))"

    def is_integral(self) -> bool:
        return self.v is None or self.v >= 0

    def is_unit(self) -> bool:
        return self.v == 0

    def in_F(self, prec: int | None = None) -> bool:
        """True when the w-part is negligible at comparison precision."""
        if self.v is None or self.y == 0:
            return True
        prec = self.ctx.cmp_prec if prec is None else prec
        return self.b.val >= prec + min(0, self.v)

    def to_f(self) -> FScalar:
        if not self.in_F():
            raise ValueError(f"{self!r} does not lie in F")
        return self.a

    def residue(self) -> tuple[int, int]:
        if self.v is None or self.v > 0:
            return (0, 0)
        if self.v < 0:
            raise ValueError("residue of a non-integral element")
        p = self.ctx.p
        return (self.x % p, self.y % p)

    def int_pair(self, R: int) -> tuple[int, int]:
        """Integers (x, y) with self = x + y w mod p^R; requires self integral."""
        if self.v is None:
            return (0, 0)
        if self.v < 0:
            raise ValueError("not integral")
        s = self.ctx.pw(self.v)
        m = self.ctx.pw(R)
        return (self.x * s % m, self.y * s % m)

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json()}

    @classmethod
    def from_json(cls, ctx, d) -> EScalar:
        return cls._from_parts(ctx, FScalar.from_json(ctx, d["a"]), FScalar.from_json(ctx, d["b"]))


Scalar = FScalar | EScalar


def val(x):
    return x.val


def eta(x) -> int:
    if isinstance(x, EScalar):
        x = x.to_f()
    if x.v is None:
        raise ZeroArgument("eta(0)")
    return -1 if x.v % 2 else 1


def conj(z: EScalar) -> EScalar:
    return z.conj()


def norm(z: EScalar) -> FScalar:
    return z.norm()


def trace(z: EScalar) -> FScalar:
    return z.trace()


def is_close(x, y, slack: int | None = None) -> bool:
    """Equality up to p^(N - slack), relative to the larger of |x|, |y|, 1."""
    ctx = x.ctx
    s = ctx.slack if slack is None else slack
    d = x - y
    if d.v is None:
        return True
    ref = min(0, x.val, y.val)
    return d.v >= ctx.N - s + ref


def _sqrt_residue_f(u: int, p: int):
    for r in range(p):
        if (r * r - u) % p == 0:
            return r
    return None


def _sqrt_residue_e(x: int, y: int, p: int, eps: int):
    for a in range(p):
        for b in range(p):
            if (a * a + eps * b * b - x) % p == 0 and (2 * a * b - y) % p == 0:
                return a, b
    return None


def is_square(x) -> bool:
    if x.v is None:
        return True
    if x.v % 2:
        return False
    p = x.ctx.p
    if isinstance(x, FScalar):
        return pow(x.u % p, (p - 1) // 2, p) == 1
    # units of E: square iff the norm residue is a square in F_p
    n = (x.x * x.x - x.ctx.eps * x.y * x.y) % p
    return pow(n, (p - 1) // 2, p) == 1


def hensel_sqrt(x):
    """Square root of x in its own field, or None when x is not a square."""
    if x.v is None:
        raise ZeroArgument("hensel_sqrt(0)")
    ctx = x.ctx
    if ctx.N - ctx.slack < 2:
        raise PrecisionExhausted("too few digits for a Newton lift")
    if not is_square(x):
        return None
    p, pN = ctx.p, ctx.pN
    h = x.v // 2
    steps = max(1, math.ceil(math.log2(ctx.R))) + 1
    inv2 = pow(2, -1, pN)
    if isinstance(x, FScalar):
        u = x.u
        r = _sqrt_residue_f(u % p, p)
        for _ in range(steps):
            r = (r + u * pow(r, -1, pN)) * inv2 % pN
        return FScalar(ctx, h, r)
    w = EScalar(ctx, 0, x.x, x.y)
    a, b = _sqrt_residue_e(x.x % p, x.y % p, p, ctx.eps)
    r = EScalar(ctx, 0, a, b)
    half = ctx.F(2).inverse()
    for _ in range(steps):
        r = (r + w / r) * half
    return EScalar(ctx, h, r.x, r.y)


def norm_preimage(u: FScalar) -> EScalar:
    """Some b in E with Nm(b) = u; u must have even valuation."""
    ctx = u.ctx
    if u.v is None:
        raise ZeroArgument("norm_preimage(0)")
    if u.v % 2:
        raise ValueError("odd valuation elements are not norms")
    p = ctx.p
    unit = FScalar(ctx, 0, u.u)
    # pick y0 with unit + eps*y0^2 a nonzero square residue, then solve x^2 = unit + eps*y0^2
    for y0 in range(p):
        t = unit + ctx.F(ctx.eps * y0 * y0)
        if t.v == 0 and is_square(t):
            r = hensel_sqrt(t)
            return EScalar._norm(ctx, u.v // 2, r.u * ctx.pw(r.v), y0)
    raise AssertionError("norm map not surjective on units")  # unreachable


def teichmuller_f(ctx: PrecisionContext, r: int) -> FScalar:
    """Teichmuller lift of a residue in F_p."""
    r %= ctx.p
    if r == 0:
        return FScalar(ctx, None, 0)
    t = r
    for _ in range(ctx.R + 1):
        t = pow(t, ctx.p, ctx.pN)
    return FScalar(ctx, 0, t)
