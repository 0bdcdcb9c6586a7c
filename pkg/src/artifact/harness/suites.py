"""Verification suites.

Each suite is a pair (make, check): ``make`` draws a case from its own
random stream and returns JSON-ready inputs, ``check`` recomputes
everything from those inputs.  ``replay`` is therefore just ``check``.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Callable

from ..dynamics import (
    cab_factor, cayley, cayley_charpoly_transform, cayley_inv, cayley_matrix, check_tjd, descent_data,
    is_strongly_compact, tjd,
)
from ..endoscopy import (
    EndoDatum, TransferFactor, lie_lift, lie_transfer_factor, transfer_factor,
)
from ..errors import ArtifactError
from ..lattice import dual, enumerate_self_dual, hnf, is_self_dual, touches_window
from ..matalg import EMatrix, EPoly, char_poly, resultant
from ..orbital import (
    integral_representative, iwasawa_cosets, kappa_orbital, kappa_orbital_lie, oracle_double_coset,
    orbit_integral_unit, stable_orbital, stable_orbital_lie,
)
from ..padic import PrecisionContext
from ..symspace import LiePoint, SymPoint, chi, chi_lie, is_member, lift_from_herm, locus, split_forms, symmetrize
from .config import PROPERTY_SUITES, VerifyConfig
from .report import Report
from .sampling import (
    LIE_MODES, MODES, case_rng, matched_case, mode_for, point_from_json, point_to_json, rand_h,
    rand_integral_matrix, rand_unit_int, rand_unitary,
)

log = logging.getLogger(__name__)

ORACLE_LEVEL = 2
ORACLE_PERIOD = 5  # every fifth oracle case is an n = 2 case


@dataclass(frozen=True)
class Suite:
    make: Callable
    check: Callable


def _ctx(inputs) -> PrecisionContext:
    return PrecisionContext.from_json(inputs["ctx"])


def _mat(ctx, d) -> EMatrix:
    return EMatrix.from_json(ctx, d)


def _tf_json(t: TransferFactor) -> dict:
    return t.to_json()


# fundamental lemma, group side

def make_fl(cfg: VerifyConfig, rng, index: int, lie: bool = False) -> dict:
    ctx = cfg.ctx()
    modes = LIE_MODES if lie else MODES
    if lie and cfg.datum.ramified:
        # odd valuations put every root in pO, so no pair is at distance 0
        modes = tuple(m for m in modes if m != "dist0")
    mode = mode_for(index, modes)
    x, (xa, xb), meta = matched_case(ctx, rng, cfg.datum, mode, lie, cfg.max_retries)
    return {
        "ctx": ctx.to_json(), "datum": cfg.datum.to_json(), "window": cfg.window, "meta": meta,
        "x": x.to_json(), "xa": point_to_json(xa), "xb": point_to_json(xb),
    }


def _fl_parts(inputs, lie):
    ctx = _ctx(inputs)
    datum = EndoDatum.from_json(inputs["datum"])
    cls = LiePoint if lie else SymPoint
    x = cls.from_json(ctx, inputs["x"])
    xa = point_from_json(ctx, inputs["xa"], lie)
    xb = point_from_json(ctx, inputs["xb"], lie)
    return ctx, datum, x, xa, xb


def check_fl(inputs: dict, lie: bool = False) -> dict:
    ctx, datum, x, xa, xb = _fl_parts(inputs, lie)
    W = inputs.get("window")
    chi_f = chi_lie if lie else chi
    chi_b = chi_f(xb) if (xa is not None and xb is not None) else None
    ko = (kappa_orbital_lie if lie else kappa_orbital)(x, datum, W, chi_b=chi_b)
    res = {"chi": chi_f(x).to_json(), "orb_kappa": ko.to_json(),
           "saturated": all(r.saturated for _, _, r in ko.breakdown)}
    if datum.ramified:
        res["ok"] = ko.value == 0
        return res
    tf = (lie_transfer_factor if lie else transfer_factor)(xa, xb, x, datum)
    so = (stable_orbital_lie if lie else stable_orbital)(xa, xb, W)
    lhs = tf.value(ctx.p) * ko.value
    res.update({"delta": _tf_json(tf), "so": so, "lhs": str(lhs), "rhs": str(so), "ok": lhs == so})
    return res


# descent

def make_descent(cfg: VerifyConfig, rng, index: int) -> dict:
    ctx = cfg.ctx()
    datum = cfg.datum
    for _ in range(cfg.max_retries):
        x, (xa, xb), meta = matched_case(ctx, rng, datum, "descent", False, cfg.max_retries)
        if datum.ramified:
            break
        xi = integral_representative(x)
        if xi is not None:
            h1, h2 = rand_h(ctx, rng, x.n)
            x = xi.conj_by(EMatrix.block_diag(h1, h2))
            break
    else:
        raise ArtifactError("no integral descent-locus sample")
    return {
        "ctx": ctx.to_json(), "datum": datum.to_json(), "window": cfg.window, "meta": meta,
        "x": x.to_json(), "xa": point_to_json(xa), "xb": point_to_json(xb),
    }


def _components(z: SymPoint | None):
    if z is None:
        return {1: None, -1: None}, True
    d = descent_data(z)
    return d.comps, d.eigen_ok


def check_descent(inputs: dict) -> dict:
    ctx, datum, x, xa, xb = _fl_parts(inputs, False)
    W = inputs.get("window")
    chi_b = chi(xb) if (xa is not None and xb is not None) else None
    ko = kappa_orbital(x, datum, W, chi_b=chi_b)
    res = {"orb_kappa": ko.to_json()}
    if datum.ramified:
        res["ok"] = ko.value == 0
        return res
    dd = descent_data(x)
    ca, ok_a = _components(xa)
    cb, ok_b = _components(xb)
    prod_orb, prod_tf, prod_so = 1, TransferFactor(1, 0), 1
    reg = True
    parts = {}
    for nu in (1, -1):
        y, ya, yb = dd.comps[nu], ca[nu], cb[nu]
        if y is None:
            if ya is not None or yb is not None:
                raise ArtifactError("endoscopic descent does not match the descent of x")
            continue
        dn = EndoDatum(ya.n if ya else 0, yb.n if yb else 0)
        kb = chi(yb) if (ya is not None and yb is not None) else None
        o = kappa_orbital(y, dn, W, chi_b=kb).value
        t = transfer_factor(ya, yb, y, dn)
        s = stable_orbital(ya, yb, W)
        prod_orb *= o
        prod_tf = prod_tf * t
        prod_so *= s
        # y_1 avoids -1 and -y_{-1} avoids +1 modulo p
        reg = reg and locus(y, -nu) == "very_regular"
        parts[str(nu)] = {"datum": dn.to_json(), "orb_kappa": o, "delta": t.to_json(), "so": s}
    tf = transfer_factor(xa, xb, x, datum)
    so = stable_orbital(xa, xb, W)
    checks = {
        "orbital_product": ko.value == prod_orb,
        "transfer_product": (tf.sign, tf.qexp) == (prod_tf.sign, prod_tf.qexp),
        "stable_product": so == prod_so,
        "fundamental_lemma": tf.value(ctx.p) * ko.value == so,
        "eigenvalue_restriction": dd.eigen_ok and ok_a and ok_b,
        "very_regular": reg,
    }
    res.update({"delta": tf.to_json(), "so": so, "components": parts, "checks": checks, "ok": all(checks.values())})
    return res


# Cayley

def make_cayley(cfg: VerifyConfig, rng, index: int) -> dict:
    ctx = cfg.ctx()
    n = 1 + index % 3
    nu = 1 if (index // 3) % 2 == 0 else -1
    forms = split_forms(ctx, n)
    for _ in range(cfg.max_retries):
        X = rand_integral_matrix(ctx, rng, n)
        d = LiePoint(X, forms)
        if (EMatrix.identity(ctx, 2 * n) - d.delta()).det().val == 0:
            break
    else:
        raise ArtifactError("no delta with a unit Cayley denominator")
    h1, h2 = rand_h(ctx, rng, n)
    lam = []
    while len(lam) < n:
        u = rand_unit_int(rng, ctx.p)
        # 1 - lambda must stay invertible for the Cayley transform of the lift
        if u not in lam and (1 - u) % ctx.p**3:
            lam.append(u)
    U = rand_unitary(ctx, rng, n)
    return {"ctx": ctx.to_json(), "nu": nu, "X": X.to_json(), "h1": h1.to_json(), "h2": h2.to_json(),
            "lam": lam, "U": U.to_json()}


def check_cayley(inputs: dict) -> dict:
    ctx = _ctx(inputs)
    nu = inputs["nu"]
    X = _mat(ctx, inputs["X"])
    n = X.rows
    d = LiePoint(X, split_forms(ctx, n))
    x = cayley(d, nu)
    h1, h2 = _mat(ctx, inputs["h1"]), _mat(ctx, inputs["h2"])
    H = EMatrix.block_diag(h1, h2)
    r = d.r()
    checks = {
        "member": is_member(x.mat),
        "roundtrip": cayley_inv(x, nu).is_close(d.delta()),
        "equivariance": cayley(d.conj_by(h1, h2), nu).mat.is_close(H @ x.mat @ H.inv()),
        "contraction": x.A.is_close(cayley_matrix(r, nu)),
        "charpoly": cayley_charpoly_transform(char_poly(d.delta()), nu, 2 * n).is_close(char_poly(x.mat)),
        "charpoly_contraction": cayley_charpoly_transform(char_poly(r), nu).is_close(char_poly(x.A)),
    }
    if n >= 2:
        checks["discriminant"] = _disc_relation(ctx, inputs["lam"], _mat(ctx, inputs["U"]), nu)
    return {"checks": checks, "ok": all(checks.values())}


def _disc_relation(ctx, lam, U, nu) -> bool:
    """Res of the Lie invariants equals C_{a,b,nu} times Res of the group invariants."""
    n = len(lam)
    a = n // 2
    b = n - a
    r = U @ EMatrix.diag(ctx, lam) @ U.dagger()
    x = cayley(lie_lift(r), nu)
    la = EPoly.from_roots(ctx, [ctx.E(v) for v in lam[:a]])
    lb = EPoly.from_roots(ctx, [ctx.E(v) for v in lam[a:]])
    za = cayley_charpoly_transform(la, nu)
    zb = cayley_charpoly_transform(lb, nu)
    if not (za * zb).is_close(char_poly(x.A)):
        return False
    lie_disc = resultant(la, lb)
    C = cab_factor(x, a, b, nu, (za, zb))
    grp = resultant(za, zb)
    return (lie_disc - ctx.E(C) * grp).val >= ctx.cmp_prec + min(0, lie_disc.val)


# topological Jordan decomposition

def make_tjd(cfg: VerifyConfig, rng, index: int) -> dict:
    ctx = cfg.ctx()
    n = 1 + index % 2
    kind = ["identity", "minus_identity", "nonintegral"][index % 10] if index % 10 < 3 else "random"
    forms = split_forms(ctx, n)
    if kind == "identity":
        x = SymPoint(EMatrix.identity(ctx, 2 * n), forms)
    elif kind == "minus_identity":
        x = SymPoint(-EMatrix.identity(ctx, 2 * n), forms)
    else:
        x = symmetrize(rand_unitary(ctx, rng, 2 * n), forms)
        if kind == "nonintegral":
            # conjugate by a non-integral element of U(V_2) x U(V_2)
            n = 2
            forms = split_forms(ctx, 2)
            x = symmetrize(rand_unitary(ctx, rng, 4), forms)
            cos = [c for c in iwasawa_cosets(ctx, 1) if c[0] != 0]
            _, _, g, gi = cos[int(rng.integers(0, len(cos)))]
            x = SymPoint(EMatrix.block_diag(g, g) @ x.mat @ EMatrix.block_diag(gi, gi), forms)
    h1, h2 = rand_h(ctx, rng, n)
    return {"ctx": ctx.to_json(), "kind": kind, "x": x.to_json(), "h1": h1.to_json(), "h2": h2.to_json()}


def check_tjd_case(inputs: dict) -> dict:
    ctx = _ctx(inputs)
    x = SymPoint.from_json(ctx, inputs["x"])
    I = EMatrix.identity(ctx, 2 * x.n)
    checks = {"strongly_compact": is_strongly_compact(x)}
    t = tjd(x)
    checks.update(check_tjd(x, t))
    t_as = tjd(t.x_as)
    t_tu = tjd(t.x_tu)
    checks["idempotent_as"] = t_as.x_as.mat.is_close(t.x_as.mat) and t_as.x_tu.mat.is_close(I)
    checks["idempotent_tu"] = t_tu.x_as.mat.is_close(I) and t_tu.x_tu.mat.is_close(t.x_tu.mat)
    H = EMatrix.block_diag(_mat(ctx, inputs["h1"]), _mat(ctx, inputs["h2"]))
    Hi = H.inv()
    tc = tjd(SymPoint(H @ x.mat @ Hi, x.forms))
    checks["conjugation"] = tc.x_as.mat.is_close(H @ t.x_as.mat @ Hi)
    return {"checks": checks, "iters": t.iters, "period": t.period, "ok": all(checks.values())}


# lattices

def make_lattice(cfg: VerifyConfig, rng, index: int) -> dict:
    ctx = cfg.ctx()
    n = 1 + index % 3
    W = 1 + (index // 3) % 2 if n < 3 else 1
    g = rand_unitary(ctx, rng, n)
    return {"ctx": ctx.to_json(), "n": n, "W": W, "g": g.to_json()}


def check_lattice(inputs: dict) -> dict:
    ctx = _ctx(inputs)
    n, W = inputs["n"], inputs["W"]
    phi = split_forms(ctx, n)[0]
    g = _mat(ctx, inputs["g"])
    lats = enumerate_self_dual(phi, W)
    inner = enumerate_self_dual(phi, W - 1) if W > 1 else [hnf(EMatrix.identity(ctx, n))]
    sset = set(lats)
    checks = {
        "self_dual": all(is_self_dual(L, phi) and dual(L, phi) == L for L in lats),
        "unitary_action": {hnf(g @ L.basis) for L in lats} == sset,
        "nested": set(inner) <= sset and not any(touches_window(L, W) for L in inner),
    }
    return {"count": len(lats), "checks": checks, "ok": all(checks.values())}


# counting model against the double-coset oracle

def make_oracle(cfg: VerifyConfig, rng, index: int) -> dict:
    ctx = cfg.ctx()
    if index % ORACLE_PERIOD == ORACLE_PERIOD - 1:
        # the n = 2 oracle enumerates p^(3 level) cosets per torus level; kept at p = 3
        ctx2 = PrecisionContext(3, ctx.N)
        mode = ("dist0", "dist1", "dist2")[(index // ORACLE_PERIOD) % 3]
        x, _, meta = matched_case(ctx2, rng, EndoDatum(2, 0), mode, False, cfg.max_retries)
        return {"ctx": ctx2.to_json(), "n": 2, "level": ORACLE_LEVEL, "meta": meta, "x": x.to_json()}
    p = ctx.p
    for _ in range(1000):
        v = int(rng.integers(-2, 3))
        u = rand_unit_int(rng, p)
        a = ctx.F(u) * ctx.F(p) ** v
        one_minus = ctx.F(1) - a * a
        if one_minus.v is not None and one_minus.v % 2 == 0:
            break
    x = lift_from_herm(EMatrix.diag(ctx, [ctx.E(a)]))
    h1, h2 = rand_h(ctx, rng, 1)
    x = x.conj_by(EMatrix.block_diag(h1, h2))
    return {"ctx": ctx.to_json(), "n": 1, "level": 0, "x": x.to_json()}


def check_oracle(inputs: dict) -> dict:
    ctx = _ctx(inputs)
    x = SymPoint.from_json(ctx, inputs["x"])
    r = orbit_integral_unit(x)
    o = oracle_double_coset(x, inputs["level"])
    return {"engine": r.count, "oracle": o, "window": r.window, "saturated": r.saturated,
            "ok": r.count == o and r.saturated}


SUITES: dict[str, Suite] = {
    "fl": Suite(make_fl, check_fl),
    "fl_lie": Suite(lambda cfg, rng, i: make_fl(cfg, rng, i, lie=True), lambda inp: check_fl(inp, lie=True)),
    "descent": Suite(make_descent, check_descent),
    "cayley": Suite(make_cayley, check_cayley),
    "tjd": Suite(make_tjd, check_tjd_case),
    "lattice": Suite(make_lattice, check_lattice),
    "oracle": Suite(make_oracle, check_oracle),
}


def _record(suite: str, index: int, inputs: dict, fn) -> dict:
    t0 = time.perf_counter()
    rec = {"index": index, "suite": suite, "inputs": inputs, "result": {}, "error": None}
    try:
        res = fn(inputs)
        rec["result"] = res
        rec["verdict"] = "pass" if res.get("ok") else "fail"
    except (ArtifactError, ValueError, ZeroDivisionError) as exc:
        rec["verdict"] = "error"
        rec["error"] = f"{type(exc).__name__}: {exc}"
    rec["runtime"] = round(time.perf_counter() - t0, 4)
    return rec


def run_suite(cfg: VerifyConfig, name: str, trials: int | None = None) -> Report:
    suite = SUITES[name]
    trials = cfg.trials if trials is None else trials
    t0 = time.perf_counter()
    cases = []
    for i in range(trials):
        rng = case_rng(cfg.seed, name, i)
        try:
            inputs = suite.make(cfg, rng, i)
        except (ArtifactError, ValueError) as exc:
            cases.append({"index": i, "suite": name, "verdict": "error", "runtime": 0.0, "result": {},
                          "inputs": {"seed": cfg.seed, "index": i}, "error": f"{type(exc).__name__}: {exc}"})
            continue
        rec = _record(name, i, inputs, suite.check)
        log.info("%s[%d] %s", name, i, rec["verdict"])
        cases.append(rec)
    return Report(cfg.to_json(), cases, time.perf_counter() - t0)


def verify_fl(cfg: VerifyConfig) -> Report:
    return run_suite(cfg, "fl")


def verify_fl_lie(cfg: VerifyConfig) -> Report:
    return run_suite(cfg, "fl_lie")


def verify_descent(cfg: VerifyConfig) -> Report:
    return run_suite(cfg, "descent")


def property_suite(cfg: VerifyConfig, suites=None) -> Report:
    names = [s for s in (suites or cfg.suites) if s in PROPERTY_SUITES] or list(PROPERTY_SUITES)
    rep = Report(cfg.to_json())
    for name in names:
        rep.extend(run_suite(cfg, name))
    return rep


def replay_case(case: dict) -> dict:
    """Recompute one case from its embedded inputs."""
    suite = SUITES[case["suite"]]
    return _record(case["suite"], case["index"], case["inputs"], suite.check)


__all__ = [
    "SUITES", "run_suite", "verify_fl", "verify_fl_lie", "verify_descent", "property_suite", "replay_case",
    "check_fl", "check_descent", "check_cayley", "check_tjd_case", "check_lattice", "check_oracle",
]
