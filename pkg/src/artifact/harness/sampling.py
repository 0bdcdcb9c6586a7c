"""Seeded sampling of matched pairs and integral group elements.

Streams come from numpy's Philox counter-based generator keyed by
(seed, suite, case index), so every case can be redrawn on its own.
"""
from __future__ import annotations

import zlib

import numpy as np

from ..endoscopy import EndoDatum, lie_lift, lie_stable_reps, stable_orbit_reps
from ..errors import ArtifactError, Degenerate, NoLift, PrecisionExhausted
from ..lattice import HermForm
from ..matalg import EMatrix
from ..padic import PrecisionContext
from ..symspace import LiePoint, SymPoint, is_rss, is_rss_lie, lift_from_herm, split_forms

DIGITS = 3  # p-adic digits per random integer
MAX_VAL = 2  # cost cap on val(a_i - a_j) and on the degeneracy valuation of each root
ROOT_DRAWS = 10_000  # cheap rejection draws per lift attempt


class SamplingExhausted(ArtifactError):
    pass


def case_rng(seed: int, suite: str, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence([seed, zlib.crc32(suite.encode()), index])
    return np.random.Generator(np.random.Philox(ss))


def rand_int(rng, bound: int) -> int:
    return int(rng.integers(0, bound))


def rand_unit_int(rng, p: int, digits: int = DIGITS) -> int:
    return int(rng.integers(1, p)) + p * rand_int(rng, p ** (digits - 1))


def rand_escalar(ctx: PrecisionContext, rng, digits: int = DIGITS):
    m = ctx.p**digits
    return ctx.E(rand_int(rng, m), rand_int(rng, m))


def rand_integral_matrix(ctx, rng, r: int, c: int | None = None) -> EMatrix:
    c = r if c is None else c
    return EMatrix(ctx, [[rand_escalar(ctx, rng) for _ in range(c)] for _ in range(r)])


def rand_skew_hermitian(ctx, rng, n: int) -> EMatrix:
    m = ctx.p**DIGITS
    rows = [[ctx.E(0)] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = ctx.E(0, rand_int(rng, m))
        for j in range(i + 1, n):
            z = rand_escalar(ctx, rng)
            rows[i][j] = z
            rows[j][i] = -z.conj()
    return EMatrix(ctx, rows)


def rand_unitary(ctx, rng, n: int, tries: int = 100) -> EMatrix:
    """Integral unitary for the identity form: Cayley of an integral skew-Hermitian
    matrix, then a permutation and a diagonal of norm-one units."""
    I = EMatrix.identity(ctx, n)
    for _ in range(tries):
        Y = rand_skew_hermitian(ctx, rng, n)
        if (I - Y).det().val == 0:
            break
    else:
        raise SamplingExhausted("no unit Cayley denominator found")
    g = (I + Y) @ (I - Y).inv()
    perm = [int(v) for v in rng.permutation(n)]
    P = EMatrix(ctx, [[1 if perm[i] == j else 0 for j in range(n)] for i in range(n)])
    zs = []
    for _ in range(n):
        z = ctx.E(rand_unit_int(rng, ctx.p), rand_int(rng, ctx.p**DIGITS))
        zs.append(z * z.conj().inverse())
    return g @ P @ EMatrix.diag(ctx, zs)


def rand_h(ctx, rng, n: int) -> tuple[EMatrix, EMatrix]:
    return rand_unitary(ctx, rng, n), rand_unitary(ctx, rng, n)


def _val(k: int, p: int) -> int:
    if k == 0:
        return 10**9
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return v


def _part_forms(ctx, k: int, label: str):
    return (HermForm.split(ctx, k), HermForm.of_label(ctx, k, label))


# root draws

MODES = ("random", "dist0", "dist1", "dist2", "descent")
LIE_MODES = ("random", "dist0", "dist1", "dist2", "small")


def mode_for(index: int, modes=MODES) -> str:
    return modes[index % len(modes)]


def _draw_roots(p: int, rng, n: int, mode: str, lie: bool) -> list[int]:
    m = p**DIGITS
    if n == 1 or mode == "random":
        return [rand_int(rng, m) for _ in range(n)]
    if mode.startswith("dist"):
        k = int(mode[4:])
        a1 = rand_int(rng, m)
        return [a1, a1 + p**k * rand_unit_int(rng, p)]
    if mode == "descent":
        r = [1 + p * rand_int(rng, m), -1 + p * rand_int(rng, m)]
        return r if rng.integers(0, 2) else r[::-1]
    if mode == "small":
        return [p ** int(rng.integers(1, 3)) * rand_unit_int(rng, p) for _ in range(n)]
    raise ValueError(f"unknown mode {mode!r}")


def _degeneracy(a: int, p: int, lie: bool) -> int:
    return _val(a, p) if lie else _val(1 - a * a, p)


def _roots_ok(roots, p, datum: EndoDatum, mode: str, lie: bool) -> bool:
    n = len(roots)
    if len(set(roots)) < n:
        return False
    degs = [_degeneracy(a, p, lie) for a in roots]
    if max(degs) > MAX_VAL:
        return False
    dists = [_val(roots[i] - roots[j], p) for i in range(n) for j in range(i + 1, n)]
    cap = int(mode[4:]) if mode.startswith("dist") else MAX_VAL
    if dists and max(dists) > cap:
        return False
    pa = sum(degs[: datum.a]) % 2
    pb = sum(degs[datum.a:]) % 2
    return (pa, pb) == (int(datum.alpha == "nonsplit"), int(datum.beta == "nonsplit"))


def _lift_part(ctx, roots, label, lie):
    if not roots:
        return None
    A = EMatrix.diag(ctx, roots)
    forms = _part_forms(ctx, len(roots), label)
    return lie_lift(A, forms) if lie else lift_from_herm(A, forms)


def _matched(ctx, rng, datum: EndoDatum, mode: str, lie: bool, retries: int, pick_class: bool = True):
    n = datum.n
    for _ in range(retries):
        for _ in range(ROOT_DRAWS):
            roots = _draw_roots(ctx.p, rng, n, mode, lie)
            if _roots_ok(roots, ctx.p, datum, mode, lie):
                break
        else:
            raise SamplingExhausted(f"no admissible roots in {ROOT_DRAWS} draws (mode {mode})")
        try:
            xa = _lift_part(ctx, roots[: datum.a], datum.alpha, lie)
            xb = _lift_part(ctx, roots[datum.a:], datum.beta, lie)
            A = EMatrix.diag(ctx, roots)
            x = lie_lift(A) if lie else lift_from_herm(A)
            if not (is_rss_lie(x) if lie else is_rss(x)):
                continue
        except (NoLift, Degenerate, PrecisionExhausted):
            continue
        cls = 0
        if pick_class and n == 2:
            cls = int(rng.integers(0, 2))
            if cls:
                x = (lie_stable_reps(x) if lie else stable_orbit_reps(x))[1]
        h1, h2 = rand_h(ctx, rng, n)
        x = x.conj_by(h1, h2) if lie else x.conj_by(EMatrix.block_diag(h1, h2))
        return x, (xa, xb), {"roots": roots, "mode": mode, "rational_class": cls}
    raise SamplingExhausted(f"every lift failed in {retries} attempts (mode {mode})")


def sample_matched_pair(cfg, rng, mode: str = "random"):
    x, parts, _ = _matched(cfg.ctx(), rng, cfg.datum, mode, False, cfg.max_retries)
    return x, parts


def sample_matched_lie(cfg, rng, mode: str = "random"):
    d, parts, _ = _matched(cfg.ctx(), rng, cfg.datum, mode, True, cfg.max_retries)
    return d, parts


def matched_case(ctx, rng, datum, mode, lie, retries):
    return _matched(ctx, rng, datum, mode, lie, retries)


def point_to_json(x):
    return None if x is None else x.to_json()


def point_from_json(ctx, d, lie=False):
    if d is None:
        return None
    return (LiePoint if lie else SymPoint).from_json(ctx, d)


__all__ = [
    "case_rng", "rand_unitary", "rand_h", "rand_integral_matrix", "sample_matched_pair",
    "sample_matched_lie", "matched_case", "MODES", "LIE_MODES", "mode_for", "SamplingExhausted",
    "split_forms",
]
