"""Sampled checkers for the structural conditions on Phi-functions.

The conditions are asymptotic, so a checker can only collect evidence.  Each
one runs a base sampling and a refined one (twice the resolution and/or a
wider range) and compares the estimated constant:

* ``pass``: finite estimate that moves by less than 10% under refinement;
* ``fail``: the estimate diverges, with a witness violating the base constant;
* ``inconclusive``: anything in between.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .phi import ArgumentError, Inverse, PhiSpec

DRIFT = 0.10
DEFAULT_BOX = (-8.0, 8.0)


@dataclass(frozen=True)
class Sampling:
    """Sampling plan: log-spaced t in ``[tmin, tmax]`` and ``nx`` x-points per axis."""

    tmin: float = 1e-6
    tmax: float = 1e6
    nt: int = 512
    nx: int = 16

    def tgrid(self) -> np.ndarray:
        return np.geomspace(self.tmin, self.tmax, self.nt)


BASE = Sampling()
REFINED = Sampling(1e-9, 1e9, 1024, 32)


@dataclass
class ConditionReport:
    condition: str
    verdict: str
    constants: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    sampling_plan: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _report(condition, verdict, constants, evidence, witnesses, plan):
    if verdict != "pass":
        constants = {}
    return ConditionReport(condition, verdict, constants, evidence, witnesses, plan)


def check_box(phi: PhiSpec, box=None) -> np.ndarray:
    if box is not None:
        return np.asarray(box, dtype=float).reshape(-1, 2)
    if phi.domain is not None:
        return np.asarray(phi.domain, dtype=float)
    return np.asarray([DEFAULT_BOX] * (phi.dim or 1), dtype=float)


def x_samples(phi: PhiSpec, box: np.ndarray, nx: int) -> np.ndarray:
    """Uniform x-samples over ``box`` (a single point when phi ignores x)."""
    if phi.x_independent:
        return box.mean(axis=1)[None, :]
    axes = [np.linspace(lo, hi, nx) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _rows(bound_fn, t: np.ndarray, m: int) -> np.ndarray:
    return bound_fn(np.broadcast_to(t, (m, t.size)).copy())


# --------------------------------------------------------------------------
# almost monotonicity


def _almost_monotone(phi, exponent, increasing, box, plan: Sampling):
    """Sampled L for ``phi(x,t)/t**exponent`` being almost increasing/decreasing."""
    pts = x_samples(phi, box, plan.nx)
    t = plan.tgrid()
    vals = _rows(phi.bind(pts).evaluate, t, pts.shape[0])
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r = vals / t ** exponent
        if increasing:
            # sup_{s<t} r(s)/r(t)
            prefix = np.maximum.accumulate(r, axis=1)
            ratio = prefix / r
            arg = np.argmax(np.where(np.isnan(ratio), 1.0, ratio), axis=None)
        else:
            # sup_{s<t} r(t)/r(s)
            suffix = np.maximum.accumulate(r[:, ::-1], axis=1)[:, ::-1]
            ratio = suffix / r
            arg = np.argmax(np.where(np.isnan(ratio), 1.0, ratio), axis=None)
    ratio = np.where(np.isnan(ratio), 1.0, ratio)
    i, j = np.unravel_index(arg, ratio.shape)
    L = float(max(1.0, ratio[i, j]))
    # recover the partner t of the witness pair
    if increasing:
        k = int(np.argmax(r[i, : j + 1]))
        pair = (float(t[k]), float(t[j]))
    else:
        k = j + int(np.argmax(r[i, j:]))
        pair = (float(t[j]), float(t[k]))
    return L, {"x": pts[i].tolist(), "s": pair[0], "t": pair[1], "ratio": L}


def almost_monotone_report(phi: PhiSpec, exponent: float, increasing: bool, box=None,
                           base: Sampling = BASE, refined: Sampling = REFINED) -> ConditionReport:
    """(aInc)/(aDec) evidence for any real exponent (no range restriction)."""
    box = check_box(phi, box)
    name = f"{'aInc' if increasing else 'aDec'}({exponent:g})"
    L0, _ = _almost_monotone(phi, exponent, increasing, box, base)
    L1, wit = _almost_monotone(phi, exponent, increasing, box, refined)
    plan = [asdict(base), asdict(refined)]
    evidence = {"L_base": L0, "L_refined": L1}
    if np.isfinite(L1) and abs(L1 - L0) <= DRIFT * L0:
        key = "L_p" if increasing else "L_q"
        return _report(name, "pass", {key: L1, "exponent": exponent}, evidence, [], plan)
    if not np.isfinite(L1) or L1 > 2.0 * L0:
        wit["constant"] = L0
        return _report(name, "fail", {}, evidence, [wit], plan)
    return _report(name, "inconclusive", {}, evidence, [], plan)


def check_aInc(phi: PhiSpec, p: float, **kw) -> ConditionReport:
    """Evidence that ``phi(x,t)/t**p`` is almost increasing, uniformly in x."""
    if not p >= 1:
        raise ArgumentError("aInc exponent must be >= 1")
    return almost_monotone_report(phi, p, True, **kw)


def check_aDec(phi: PhiSpec, q: float, **kw) -> ConditionReport:
    """Evidence that ``phi(x,t)/t**q`` is almost decreasing, uniformly in x."""
    if not q >= 1:
        raise ArgumentError("aDec exponent must be >= 1")
    return almost_monotone_report(phi, q, False, **kw)


def inverse_monotonicity(phi: PhiSpec, p: float, q: float, **kw) -> tuple[ConditionReport, ConditionReport]:
    """(aInc)_{1/q} and (aDec)_{1/p} evidence for the inverse of ``phi``."""
    inv = Inverse(phi)
    return (almost_monotone_report(inv, 1.0 / q, True, **kw),
            almost_monotone_report(inv, 1.0 / p, False, **kw))


# --------------------------------------------------------------------------
# (A0)


def _beta_a0(phi, pts):
    c = phi.bind(pts).inverse(np.ones(pts.shape[0]) if not phi.x_independent else np.ones(1))
    c = np.broadcast_to(c, (pts.shape[0],))
    with np.errstate(divide="ignore"):
        b = np.minimum(c, 1.0 / c)
    b = np.where(np.isnan(b), 0.0, b)
    i = int(np.argmin(b))
    return float(b[i]), pts[i]


def check_A0(phi: PhiSpec, threshold: float = 1e-3, box=None, nx: int = 16) -> ConditionReport:
    """Estimate beta with ``beta <= phi^{-1}(x, 1) <= 1/beta``."""
    box = check_box(phi, box)
    b0, _ = _beta_a0(phi, x_samples(phi, box, nx))
    b1, x1 = _beta_a0(phi, x_samples(phi, box, 2 * nx + 1))
    plan = [{"nx": nx}, {"nx": 2 * nx + 1}]
    ev = {"beta_base": b0, "beta_refined": b1}
    if b1 < threshold:
        wit = {"x": x1.tolist(), "inverse_at_1": float(phi.bind(x1[None]).inverse(np.ones(1))[0]), "threshold": threshold}
        return _report("A0", "fail", {}, ev, [wit], plan)
    if abs(b1 - b0) <= DRIFT * b0:
        return _report("A0", "pass", {"beta": b1}, ev, [], plan)
    return _report("A0", "inconclusive", {}, ev, [], plan)


# --------------------------------------------------------------------------
# (A1)


def _a1_cubes(box, side, probes):
    """Cubes of the given side centred at the probes, shifted by +-side/4."""
    n = box.shape[0]
    shifts = np.array([-0.25, 0.0, 0.25]) * side
    out = []
    for c in probes:
        for s in shifts:
            lo = c + s - side / 2
            hi = lo + side
            if np.all(lo >= box[:, 0]) and np.all(hi <= box[:, 1]):
                out.append(lo)
    return np.array(out).reshape(-1, n)


def _a1_beta(phi, box, levels, probes, nt, extended_tmin):
    n = box.shape[0]
    per_axis = 5 if n == 1 else 3
    offs = np.linspace(0.0, 1.0, per_axis)
    grid = np.stack([m.ravel() for m in np.meshgrid(*([offs] * n), indexing="ij")], axis=1)
    best, wit = 1.0, None
    for k in levels:
        side = 2.0 ** (-k)
        los = _a1_cubes(box, side, probes)
        if los.size == 0:
            continue
        pts = (los[:, None, :] + side * grid[None, :, :]).reshape(-1, n)
        vol = side ** n
        t0 = extended_tmin if extended_tmin is not None else 1.0
        t = np.geomspace(t0, 1.0 / vol, nt) if vol < 1 or t0 < 1 else np.ones(1)
        inv = _rows(phi.bind(pts).inverse, t, pts.shape[0]) if not phi.x_independent else None
        if inv is None:
            continue
        inv = inv.reshape(los.shape[0], grid.shape[0], t.size)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = inv.min(axis=1) / inv.max(axis=1)
        ratio = np.where(np.isnan(ratio), 1.0, ratio)
        c, j = np.unravel_index(np.argmin(ratio), ratio.shape)
        if ratio[c, j] < best:
            best = float(ratio[c, j])
            cube_pts = pts.reshape(los.shape[0], grid.shape[0], n)[c]
            col = inv[c, :, j]
            wit = {"cube_anchor": los[c].tolist(), "side": side, "t": float(t[j]),
                   "x": cube_pts[int(np.argmax(col))].tolist(), "y": cube_pts[int(np.argmin(col))].tolist(),
                   "ratio": best}
    return best, wit


def check_A1(phi: PhiSpec, box=None, depth: int = 8, step: int = 4, nprobes: int = 17,
             nt: int = 16, extended_tmin: float | None = None) -> ConditionReport:
    """Estimate beta with ``beta phi^{-1}(x,t) <= phi^{-1}(y,t)`` for x, y in Q, t in [1, 1/|Q|].

    Cubes of side ``2**-k`` are centred at uniform probes (plus the origin
    when it lies in the box) and shifted by a quarter side.  The estimate is
    recomputed with ``step`` and ``2*step`` additional levels.  With
    ``extended_tmin`` the t-range becomes ``[extended_tmin, 1/|Q|]``.
    """
    box = check_box(phi, box)
    n = box.shape[0]
    plan = [{"depth": depth + i * step, "probes": nprobes, "nt": nt, "tmin": extended_tmin or 1.0} for i in range(3)]
    if phi.x_independent:
        return _report("A1", "pass", {"beta": 1.0}, {"betas": [1.0, 1.0, 1.0]}, [], plan)
    axes = [np.linspace(lo, hi, nprobes) for lo, hi in box]
    probes = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=1)
    if np.all((box[:, 0] <= 0) & (box[:, 1] >= 0)):
        probes = np.vstack([probes, np.zeros((1, n))])
    betas, wits = [], []
    for i in range(3):
        b, w = _a1_beta(phi, box, range(0, depth + i * step + 1), probes, nt, extended_tmin)
        betas.append(b)
        wits.append(w)
    ev = {"betas": betas}
    drops = [(betas[i] - betas[i + 1]) / betas[i] if betas[i] > 0 else 0.0 for i in range(2)]
    if betas[2] > 0 and drops[1] < DRIFT:
        return _report("A1", "pass", {"beta": betas[2]}, ev, [], plan)
    if betas[2] == 0 or all(d > DRIFT for d in drops):
        w = dict(wits[2] or {})
        w["constant"] = betas[0]
        return _report("A1", "fail", {}, ev, [w], plan)
    return _report("A1", "inconclusive", {}, ev, [], plan)


# --------------------------------------------------------------------------
# (A2)


def _shell_points(box, radius, nang=16):
    n = box.shape[0]
    if n == 1:
        return np.array([[-radius], [radius]])
    ang = np.linspace(0, 2 * np.pi, nang, endpoint=False)
    return np.stack([radius * np.cos(ang), radius * np.sin(ang)], axis=1)


def check_A2(phi: PhiSpec, box=None, s: float = 1.0, nshells: int = 6, nt: int = 256,
             nx: int = 257, tmin: float = 1e-6) -> ConditionReport:
    """Evidence for ``phi(x, beta t) <= phi_inf(t) + h(x)`` and the reverse, on ``t <= s``.

    ``phi_inf`` is read off the outermost of ``nshells`` geometric shells
    (radii halving inwards from the box edge).  ``h`` is the sampled envelope
    for the best beta in {1, 1/2, 1/4, 1/8}; integrability is judged by the
    fraction of its mass beyond half the box radius.
    """
    box = check_box(phi, box)
    n = box.shape[0]
    plan = [{"shells": nshells, "nt": nt, "nx": nx, "s": s}]
    if phi.x_independent:
        return _report("A2", "pass", {"beta": 1.0, "h_integral": 0.0}, {"h_max": 0.0}, [], plan)
    rmax = float(np.min(np.maximum(np.abs(box[:, 0]), np.abs(box[:, 1]))))
    t = np.geomspace(tmin, s, nt)
    radii = rmax * 2.0 ** -np.arange(nshells - 1, -1, -1)
    shells = []
    for R in radii:
        sp = _shell_points(box, R)
        sp = sp[np.all((sp >= box[:, 0]) & (sp <= box[:, 1]), axis=1)]
        shells.append(_rows(phi.bind(sp).evaluate, t, sp.shape[0]).max(axis=0))
    shells = np.array(shells)
    phi_inf = shells[-1]
    scale = max(float(phi_inf[-1]), 1e-300)
    drift = float(max(np.max(np.abs(shells[-1] - shells[-2])), np.max(np.abs(shells[-2] - shells[-3]))) / scale)
    ev = {"shell_radii": radii.tolist(), "shell_drift": drift}
    if not np.isfinite(drift) or drift > DRIFT:
        return _report("A2", "inconclusive", {}, ev, [], plan)
    pts = x_samples(phi, box, nx if n == 1 else max(17, nx // 8))
    bound = phi.bind(pts)
    inf_at = _interp_loglog(t, phi_inf)
    best = None
    cell = np.prod((box[:, 1] - box[:, 0]) / (pts.shape[0] ** (1.0 / n)))
    for beta in (1.0, 0.5, 0.25, 0.125):
        a = _rows(bound.evaluate, beta * t, pts.shape[0]) - phi_inf[None, :]
        b = inf_at(beta * t)[None, :] - _rows(bound.evaluate, t, pts.shape[0])
        h = np.maximum(np.maximum(a, b).max(axis=1), 0.0)
        mass = float(h.sum() * cell)
        if best is None or mass < best[1] - 1e-15:
            best = (beta, mass, h)
    beta, mass, h = best
    r = np.sqrt(np.sum(pts ** 2, axis=1))
    tail = r >= rmax / 2
    ev.update({"h_x": pts.tolist(), "h": h.tolist(), "h_integral": mass})
    if mass == 0.0:
        return _report("A2", "pass", {"beta": beta, "h_integral": 0.0}, ev, [], plan)
    frac = float(h[tail].sum() * cell / mass)
    ev["tail_fraction"] = frac
    if frac < DRIFT:
        return _report("A2", "pass", {"beta": beta, "h_integral": mass}, ev, [], plan)
    i = int(np.argmax(np.where(tail, h, -1.0)))
    wit = {"x": pts[i].tolist(), "h": float(h[i]), "beta": beta}
    return _report("A2", "fail", {}, ev, [wit], plan)


def _interp_loglog(t, v):
    lt = np.log(t)

    def f(u):
        with np.errstate(divide="ignore"):
            lv = np.log(np.maximum(v, 1e-300))
        return np.exp(np.interp(np.log(u), lt, lv, left=-np.inf))

    return f


# --------------------------------------------------------------------------
# equivalence


def _equiv_L(phi, psi, box, plan):
    pts = x_samples(phi if not phi.x_independent else psi, box, plan.nx)
    t = plan.tgrid()
    m = pts.shape[0]
    pb, qb = phi.bind(pts), psi.bind(pts)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        a = qb.inverse(_rows(pb.evaluate, t, m)) / t
        b = pb.inverse(_rows(qb.evaluate, t, m)) / t
    r = np.maximum(np.where(np.isnan(a), 1.0, a), np.where(np.isnan(b), 1.0, b))
    i, j = np.unravel_index(np.argmax(r), r.shape)
    return float(max(1.0, r[i, j])), {"x": pts[i].tolist(), "t": float(t[j]), "ratio": float(r[i, j])}


def equivalence_constant(phi: PhiSpec, psi: PhiSpec, box=None, base: Sampling = BASE,
                         refined: Sampling = REFINED) -> ConditionReport:
    """Smallest sampled L with ``psi(x, t/L) <= phi(x, t) <= psi(x, L t)``."""
    box = check_box(phi if phi.domain is not None else psi, box)
    L0, _ = _equiv_L(phi, psi, box, base)
    L1, wit = _equiv_L(phi, psi, box, refined)
    plan = [asdict(base), asdict(refined)]
    ev = {"L_base": L0, "L_refined": L1}
    if np.isfinite(L1) and abs(L1 - L0) <= DRIFT * L0:
        return _report("equivalence", "pass", {"L": L1}, ev, [], plan)
    if not np.isfinite(L1) or L1 > 2.0 * L0:
        wit["constant"] = L0
        return _report("equivalence", "fail", {}, ev, [wit], plan)
    return _report("equivalence", "inconclusive", {}, ev, [], plan)


def check_condition(phi: PhiSpec, cond: str, **kw) -> ConditionReport:
    """Dispatch on ``A0``, ``A1``, ``A2``, ``aInc:p`` or ``aDec:q``."""
    if cond == "A0":
        return check_A0(phi, **kw)
    if cond == "A1":
        return check_A1(phi, **kw)
    if cond == "A2":
        return check_A2(phi, **kw)
    name, _, val = cond.partition(":")
    if name == "aInc" and val:
        return check_aInc(phi, float(val), **kw)
    if name == "aDec" and val:
        return check_aDec(phi, float(val), **kw)
    raise ArgumentError(f"unknown condition {cond!r}")
