"""Constructions producing new Phi-functions: regularisation, target space,
sharp-alpha transform and power scaling.

All outputs are derived :class:`~gorlicz.phi.PhiSpec` objects that carry a
provenance record (kind, parameters, parent hash) in their JSON form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .conditions import check_A0, check_aDec, check_box
from .phi import (
    DEFAULT_TAB,
    ArgumentError,
    ConstructionError,
    Derived,
    PhiSpec,
    PowerScaled,
    PreconditionError,
    FunctionBound,
    TableBound,
    _col,
    Tabulation,
    _tab_from,
    phi_from_dict,
    register,
)

SHELL_DRIFT = 0.10


@dataclass(frozen=True)
class TransformRecord:
    kind: str
    parent: str
    parameters: dict = field(default_factory=dict)


def transform_record(spec: Derived) -> TransformRecord:
    rec = spec.record()
    return TransformRecord(rec["kind"], rec["parent_hash"][0], rec["parameters"])


def _with_one(grid: np.ndarray) -> np.ndarray:
    return np.union1d(grid, [1.0])


def _shell_points(box: np.ndarray, nshells: int = 6, nang: int = 16) -> list[np.ndarray]:
    rmax = float(np.min(np.maximum(np.abs(box[:, 0]), np.abs(box[:, 1]))))
    out = []
    for k in range(nshells - 1, -1, -1):
        R = rmax * 2.0 ** -k
        if box.shape[0] == 1:
            pts = np.array([[-R], [R]])
        else:
            ang = np.linspace(0, 2 * np.pi, nang, endpoint=False)
            pts = np.stack([R * np.cos(ang), R * np.sin(ang)], axis=1)
        out.append(pts[np.all((pts >= box[:, 0]) & (pts <= box[:, 1]), axis=1)])
    return out


@register("regularized", derived=True)
@dataclass(frozen=True, eq=False, repr=False)
class Regularized(Derived):
    """Regularised version of ``parent`` with value exactly 1 at t = 1.

    phi_1(x,t) = phi(x, t phi^{-1}(x,1)),  phi_2 = max(phi_1, 2t - 1),
    result = (phi_2)_inf(t) for t < 1 and 2 phi_2(x,t) - 1 for t >= 1, where
    (phi_2)_inf is the maximum over the outermost three geometric shells.
    """

    parent: PhiSpec
    tab: Tabulation = DEFAULT_TAB
    box: tuple | None = None
    check: bool = True
    inconclusive: bool = field(default=False, init=False)
    shell_drift: float = field(default=0.0, init=False)

    def __post_init__(self):
        object.__setattr__(self, "parents", (self.parent,))
        object.__setattr__(self, "domain", self.parent.domain)
        if self.check:
            rep = check_A0(self.parent, box=self.box)
            if not rep.passed:
                raise PreconditionError("regularisation needs (A0) for the parent", rep)
        g = _with_one(self.tab.grid())
        object.__setattr__(self, "_grid", g)
        if self.parent.x_independent:
            inf_row = self._phi2(np.zeros((1, self.parent.dim or 1)))[0]
        else:
            box = check_box(self.parent, self.box)
            shells = [self._phi2(sp).max(axis=0) for sp in _shell_points(box)]
            inf_row = np.max(shells[-3:], axis=0)
            below = g <= 1.0
            drift = max(np.max(np.abs(shells[-1][below] - shells[-2][below])),
                        np.max(np.abs(shells[-2][below] - shells[-3][below])))
            object.__setattr__(self, "shell_drift", float(drift))
            object.__setattr__(self, "inconclusive", bool(drift > SHELL_DRIFT))
        object.__setattr__(self, "_phi2_inf", inf_row)

    def _params(self):
        return {"tab": self.tab.to_dict(), "box": None if self.box is None else [list(b) for b in self.box],
                "check": self.check}

    def _phi1(self, pts):
        pb = self.parent._bind(pts)
        g = self._grid
        c = pb.inverse(np.ones(pts.shape[0]))
        v = pb.evaluate(np.outer(c, g))
        at1 = int(np.searchsorted(g, 1.0))
        close = np.abs(v[:, at1] - 1.0) <= 1e-12
        v[close, at1] = 1.0
        return v

    def _phi2(self, pts):
        return np.maximum(self._phi1(pts), 2.0 * self._grid - 1.0)

    def intermediates(self, points) -> dict:
        """Tabulated phi_1, phi_2 and (phi_2)_inf on the internal grid."""
        pts = self.check_points(points)
        return {"grid": self._grid, "phi1": self._phi1(pts), "phi2": self._phi2(pts), "phi2_inf": self._phi2_inf}

    def _bind(self, pts):
        g = self._grid
        below = g <= 1.0
        low = TableBound(g[None, below], self._phi2_inf[None, below], npoints=pts.shape[0], cap=self.tab.cap)
        pb = self.parent._bind(pts)
        c = pb.inverse(np.ones(pts.shape[0]))

        def phi2(t):
            v = pb.evaluate(_col(c, t) * t)
            v = np.where(t == 1.0, np.where(np.abs(v - 1.0) <= 1e-12, 1.0, v), v)
            return np.maximum(v, 2.0 * t - 1.0)

        def ev(t):
            lo = low.evaluate(np.minimum(t, 1.0))
            return np.where(t < 1.0, lo, 2.0 * phi2(t) - 1.0)

        def inv(y):
            u = 0.5 * (y + 1.0)
            hi = np.minimum(pb.inverse(u) / _col(c, y), 0.5 * (u + 1.0))
            return np.where(y <= 1.0, low.inverse(np.minimum(y, 1.0)), np.maximum(hi, 1.0))

        return FunctionBound(pts.shape[0], ev, inv, cap=self.tab.cap)

    @classmethod
    def from_dict(cls, d):
        P = d["params"]
        return cls(phi_from_dict(d["parents"][0]), _tab_from(P.get("tab")),
                   None if P.get("box") is None else tuple(map(tuple, P["box"])), P.get("check", True))


def _require(phi, alpha, n, r, verify):
    if not 0 < alpha < n:
        raise ArgumentError("alpha must lie in (0, n)")
    if not verify:
        return
    if r is None:
        raise ArgumentError("verification needs the (aDec) parameter r; pass r or verify=False")
    if not r > alpha / n:
        raise ArgumentError(f"need r > alpha/n = {alpha / n:g}, got r = {r:g}")
    rep = check_aDec(phi, 1.0 / r)
    if not rep.passed:
        raise PreconditionError(f"parent does not satisfy aDec({1.0 / r:g})", rep)


@register("target_psi", derived=True)
@dataclass(frozen=True, eq=False, repr=False)
class TargetPsi(Derived):
    """Target space psi with ``psi^{-1}(x,t) = t^{-alpha/n} phi^{-1}(x,t)`` on the grid."""

    parent: PhiSpec
    alpha: float
    n: int = 1
    r: float | None = None
    tab: Tabulation = DEFAULT_TAB
    verify: bool = True

    def __post_init__(self):
        object.__setattr__(self, "parents", (self.parent,))
        object.__setattr__(self, "domain", self.parent.domain)
        _require(self.parent, self.alpha, self.n, self.r, self.verify)

    def _params(self):
        return {"alpha": self.alpha, "n": self.n, "r": self.r, "tab": self.tab.to_dict(), "verify": self.verify}

    def inverse_table(self, pts) -> tuple[np.ndarray, np.ndarray]:
        """Nodes ``(t, psi^{-1}(x, t))`` per point.

        The t-nodes are the images ``phi(x, s)`` of the tabulation grid, so the
        table spans the full range of phi whatever its growth.
        """
        s = self.tab.grid()
        pb = self.parent._bind(pts)
        t = pb.evaluate(np.broadcast_to(s, (pts.shape[0], s.size)).copy())
        if np.any(~np.isfinite(t)) or np.any(t <= 0):
            raise ConstructionError("parent must be finite and positive on the tabulation grid")
        t = np.maximum.accumulate(t, axis=1)
        taus = t ** (-self.alpha / self.n) * pb.inverse(t)
        if np.any(~np.isfinite(taus)):
            raise ConstructionError("t^(-alpha/n) phi^{-1} is not finite on the grid")
        # almost increasing under (aDec); the running maximum is an equivalent
        # increasing inverse, within the almost-monotonicity constant
        return t, np.maximum.accumulate(taus, axis=1)

    def _bind(self, pts):
        t, taus = self.inverse_table(pts)
        return TableBound(taus, t, npoints=pts.shape[0], cap=self.tab.cap)

    @classmethod
    def from_dict(cls, d):
        P = d["params"]
        return cls(phi_from_dict(d["parents"][0]), P["alpha"], P["n"], P.get("r"), _tab_from(P.get("tab")),
                   P.get("verify", True))


@register("sharp_alpha", derived=True)
@dataclass(frozen=True, eq=False, repr=False)
class SharpAlpha(Derived):
    """``phi(x, lambda^{-1}(x,t))`` with ``lambda(x,t) = t phi(x,t)^{-alpha/n}``."""

    parent: PhiSpec
    alpha: float
    n: int = 1
    r: float | None = None
    tab: Tabulation = DEFAULT_TAB
    verify: bool = True

    def __post_init__(self):
        object.__setattr__(self, "parents", (self.parent,))
        object.__setattr__(self, "domain", self.parent.domain)
        _require(self.parent, self.alpha, self.n, self.r, self.verify)

    def _params(self):
        return {"alpha": self.alpha, "n": self.n, "r": self.r, "tab": self.tab.to_dict(), "verify": self.verify}

    def _bind(self, pts):
        g = self.tab.grid()
        vals = self.parent._bind(pts).evaluate(np.broadcast_to(g, (pts.shape[0], g.size)).copy())
        with np.errstate(divide="ignore"):
            lam = g * vals ** (-self.alpha / self.n)
        if np.any(~np.isfinite(lam)):
            raise ConstructionError("lambda(x, .) is not finite on the grid")
        # lambda is only almost increasing; inf{tau : lambda(tau) >= t} equals the
        # same infimum taken over its running maximum
        lam = np.maximum.accumulate(lam, axis=1)
        return TableBound(lam, vals, cap=self.tab.cap)

    @classmethod
    def from_dict(cls, d):
        P = d["params"]
        return cls(phi_from_dict(d["parents"][0]), P["alpha"], P["n"], P.get("r"), _tab_from(P.get("tab")),
                   P.get("verify", True))


def regularize(phi: PhiSpec, tab: Tabulation = DEFAULT_TAB, box=None) -> Regularized:
    return Regularized(phi, tab, None if box is None else tuple(map(tuple, np.asarray(box).reshape(-1, 2))))


def target_psi(phi: PhiSpec, alpha: float, n: int | None = None, r: float | None = None,
               tab: Tabulation = DEFAULT_TAB, verify: bool = True) -> TargetPsi:
    return TargetPsi(phi, alpha, n or phi.dim or 1, r, tab, verify)


def sharp_alpha(phi: PhiSpec, alpha: float, n: int | None = None, r: float | None = None,
                tab: Tabulation = DEFAULT_TAB, verify: bool = True) -> SharpAlpha:
    return SharpAlpha(phi, alpha, n or phi.dim or 1, r, tab, verify)


def power_scale(phi: PhiSpec, s: float) -> PowerScaled:
    return PowerScaled(phi, s)
