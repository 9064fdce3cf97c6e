"""Generalized Phi-functions phi(x, t): parametric families, tables, derived forms.

Every Phi-function is immutable.  Numerical work happens on a *bound*
instance: ``phi.bind(points)`` freezes the x-dependence at a set of points and
returns an object with vectorised ``evaluate(t)`` and ``inverse(y)``.  Rows of
``t`` correspond to the bound points (or broadcast when the function does not
depend on x).

Derived forms (conjugates, target spaces, regularisations, ...) are computed
on a log-spaced tabulation grid and read back through a monotone log-log
interpolant, see :class:`TableBound`.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar

import numpy as np

from .extreal import DEFAULT_CAP, saturate


class DomainError(ValueError):
    """A point lies outside the domain of a Phi-function."""


class ArgumentError(ValueError):
    """Invalid scalar argument (negative t, exponent out of range, ...)."""


class ConstructionError(ValueError):
    """A derived Phi-function cannot be built (non-monotone table etc.)."""


class PreconditionError(ValueError):
    """A structural condition required by a construction failed."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class Tabulation:
    """Log-spaced t-grid used by every tabulated or derived Phi-function."""

    tmin: float = 1e-6
    tmax: float = 1e6
    size: int = 4096
    cap: float = DEFAULT_CAP

    def grid(self) -> np.ndarray:
        return np.geomspace(self.tmin, self.tmax, self.size)

    def refined(self) -> "Tabulation":
        return Tabulation(self.tmin, self.tmax, 2 * self.size, self.cap)

    def to_dict(self):
        return {"tmin": self.tmin, "tmax": self.tmax, "size": self.size, "cap": self.cap}


DEFAULT_TAB = Tabulation()

Box = tuple


def as_box(box) -> tuple:
    """Normalise ``[(lo, hi), ...]`` (or a single ``(lo, hi)``) to a tuple of pairs."""
    if box is None:
        return None
    arr = np.asarray(box, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ArgumentError(f"box must be a sequence of (lo, hi) pairs, got {box!r}")
    if np.any(~(arr[:, 1] > arr[:, 0])):
        raise ArgumentError(f"degenerate box {box!r}")
    return tuple((float(lo), float(hi)) for lo, hi in arr)


def as_points(x, n: int | None = None) -> np.ndarray:
    """Coerce to an ``(M, n)`` array of points."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return x.reshape(1, 1)
    if x.ndim == 1:
        if n is not None and n > 1 and x.shape[0] == n:
            return x.reshape(1, n)
        return x.reshape(-1, 1)
    if x.ndim != 2:
        raise ArgumentError("points must be a scalar, a 1-d array or an (M, n) array")
    return x


def _check_t(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.isnan(t).any() or (t < 0).any():
        raise ArgumentError("t must be non-negative")
    return t


def _prep(t, npoints: int) -> np.ndarray:
    """Shape ``t`` so that its leading axis indexes the bound points."""
    t = _check_t(t)
    if t.ndim == 0:
        return np.full(npoints, float(t))
    if t.shape[0] not in (npoints, 1) and npoints != 1:
        raise ArgumentError(f"leading axis of t ({t.shape[0]}) must match {npoints} points")
    return t


def _col(c: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Reshape a per-point coefficient to broadcast against ``t``."""
    c = np.asarray(c, dtype=float)
    return c.reshape(c.shape[:1] + (1,) * (t.ndim - 1))


# --------------------------------------------------------------------------
# x-dependent coefficients


_SHAPES = ("constant", "step", "decay", "bump", "sine", "abs")


@dataclass(frozen=True, eq=False)
class Coefficient:
    """A coefficient function ``x -> c(x)`` (variable exponent, double-phase weight).

    ``shape`` is one of ``constant``, ``step``, ``decay``, ``bump``, ``sine``,
    ``abs`` (closed forms) or ``samples`` (piecewise constant on the cells of a
    box).
    """

    shape: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.shape not in _SHAPES + ("samples",):
            raise ArgumentError(f"unknown coefficient shape {self.shape!r}")

    @property
    def is_constant(self) -> bool:
        return self.shape == "constant"

    def __call__(self, points) -> np.ndarray:
        x = np.asarray(points, dtype=float)
        P = self.params
        if self.shape == "constant":
            return np.full(x.shape[0], float(P["value"]))
        if self.shape == "step":
            xa = x[:, int(P.get("axis", 0))]
            return np.where(xa <= float(P.get("at", 0.0)), float(P["left"]), float(P["right"]))
        r = np.sqrt(np.sum(x * x, axis=1))
        if self.shape == "decay":
            pw = float(P.get("power", 2.0))
            return float(P["limit"]) + float(P["amplitude"]) / (1.0 + (r / float(P.get("scale", 1.0))) ** pw)
        if self.shape == "bump":
            c = np.broadcast_to(np.asarray(P.get("center", 0.0), dtype=float), (x.shape[1],))
            d2 = np.sum((x - c) ** 2, axis=1)
            return float(P["amplitude"]) * np.exp(-d2 / float(P.get("width", 1.0)) ** 2)
        if self.shape == "sine":
            xa = x[:, int(P.get("axis", 0))]
            return float(P["mean"]) + float(P["amplitude"]) * np.sin(float(P.get("freq", 1.0)) * xa)
        if self.shape == "abs":
            return float(P.get("offset", 0.0)) + float(P.get("scale", 1.0)) * r
        # samples: nearest cell of a uniform grid over ``box``
        box = np.asarray(P["box"], dtype=float)
        res = np.asarray(P["resolution"], dtype=int)
        vals = np.asarray(P["values"], dtype=float).reshape(tuple(res))
        h = (box[:, 1] - box[:, 0]) / res
        idx = np.floor((x - box[:, 0]) / h).astype(int)
        idx = np.clip(idx, 0, res - 1)
        return vals[tuple(idx.T)]

    def to_dict(self):
        if self.shape == "samples":
            P = dict(self.params)
            P["values"] = np.asarray(P["values"], dtype=float).ravel().tolist()
            return {"kind": "samples", "data": P}
        return {"kind": "closed_form", "data": {"shape": self.shape, **self.params}}

    @classmethod
    def from_dict(cls, d):
        data = dict(d["data"])
        if d["kind"] == "samples":
            return cls("samples", data)
        shape = data.pop("shape")
        return cls(shape, data)

    @classmethod
    def constant(cls, value: float) -> "Coefficient":
        return cls("constant", {"value": float(value)})


def _coef(c) -> Coefficient:
    if isinstance(c, Coefficient):
        return c
    if isinstance(c, dict):
        return Coefficient.from_dict(c) if "kind" in c else Coefficient(c.pop("shape"), c)
    return Coefficient.constant(float(c))


# --------------------------------------------------------------------------
# bound Phi-functions


_LOG_TINY = math.log(1e-300)
_LOG_HUGE = math.log(1e300)


def bisect_inverse(evaluate: Callable[[np.ndarray], np.ndarray], y: np.ndarray, iters: int = 72) -> np.ndarray:
    """Generalised inverse ``inf{tau : phi(tau) >= y}`` by bisection in log(tau).

    Works for any non-decreasing ``evaluate``.  The bracket spans
    ``[1e-300, 1e300]``; 72 halvings take it below one ulp.
    """
    y = np.asarray(y, dtype=float)
    lo = np.full(y.shape, _LOG_TINY)
    hi = np.full(y.shape, _LOG_HUGE)
    top = evaluate(np.exp(hi))
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = evaluate(np.exp(mid)) >= y
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    out = np.exp(hi)
    out = np.where(top < y, np.inf, out)
    bottom = evaluate(np.exp(np.full(y.shape, _LOG_TINY)))
    out = np.where(bottom >= y, 0.0, out)
    return np.where(y <= 0, 0.0, out)


class Bound:
    """A Phi-function frozen at ``npoints`` points."""

    npoints: int = 1

    def evaluate(self, t) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def inverse(self, y) -> np.ndarray:
        y = _prep(y, self.npoints)
        return bisect_inverse(self.evaluate, y)


class FunctionBound(Bound):
    """Bound instance backed by closures."""

    def __init__(self, npoints, evaluate, inverse=None, cap=DEFAULT_CAP):
        self.npoints = npoints
        self._evaluate = evaluate
        self._inverse = inverse
        self.cap = cap

    def evaluate(self, t):
        t = _prep(t, self.npoints)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            v = self._evaluate(t)
        v = np.where(t == 0, 0.0, v)
        return saturate(v, self.cap)

    def inverse(self, y):
        y = _prep(y, self.npoints)
        if self._inverse is None:
            return bisect_inverse(self.evaluate, y)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            v = self._inverse(y)
        return np.where(y <= 0, 0.0, v)


def _take(arr: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """``arr[row, idx]`` where row runs over the leading axis of ``idx``."""
    R = arr.shape[0]
    if R == 1:
        return arr[0][idx]
    rows = np.arange(idx.shape[0]).reshape((-1,) + (1,) * (idx.ndim - 1))
    return arr[rows, idx]


def row_search(table: np.ndarray, q: np.ndarray, side: str = "left") -> np.ndarray:
    """Per-row ``searchsorted`` on a 2-d array of non-decreasing rows."""
    R, G = table.shape
    if R == 1:
        return np.searchsorted(table[0], q, side=side)
    lo = np.zeros(q.shape, dtype=np.int64)
    hi = np.full(q.shape, G, dtype=np.int64)
    for _ in range(int(math.ceil(math.log2(G + 1))) + 1):
        active = lo < hi
        if not active.any():
            break
        mid = (lo + hi) // 2
        v = _take(table, np.minimum(mid, G - 1))
        right = (v < q) if side == "left" else (v <= q)
        lo = np.where(active & right, mid + 1, lo)
        hi = np.where(active & ~right, mid, hi)
    return lo


def _end_exponent(t0, t1, v0, v1) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        e = np.log(v1 / v0) / np.log(t1 / t0)
    ok = (v0 > 0) & np.isfinite(v0) & np.isfinite(v1) & (v1 > 0) & np.isfinite(e)
    return np.where(ok, np.maximum(e, 0.0), 0.0)


class TableBound(Bound):
    """Monotone piecewise log-log interpolant through nodes ``(taus, vals)``.

    ``taus`` and ``vals`` are ``(R, G)`` arrays (``R`` = 1 when shared) with
    non-decreasing rows.  Between two positive finite nodes the function is a
    power law; between a zero node and a finite one it is linear; a jump to
    ``inf`` happens at the right node.  Outside the nodes the end power laws
    are extended.  :meth:`inverse` is the exact generalised inverse of this
    interpolant: it returns the left endpoint of the first cell reaching the
    target.
    """

    def __init__(self, taus, vals, npoints=None, cap=DEFAULT_CAP):
        taus = np.atleast_2d(np.asarray(taus, dtype=float))
        vals = np.atleast_2d(np.asarray(vals, dtype=float))
        R = max(taus.shape[0], vals.shape[0])
        self.taus = taus
        self.vals = saturate(vals, cap)
        self.npoints = npoints if npoints is not None else R
        self.cap = cap
        G = taus.shape[1]
        if vals.shape[1] != G:
            raise ConstructionError("taus and vals must have the same number of nodes")
        tb = np.broadcast_to(taus, (R, G))
        vb = np.broadcast_to(self.vals, (R, G))
        self.head = _end_exponent(tb[:, 0], tb[:, 1], vb[:, 0], vb[:, 1])[:, None]
        self.tail = _end_exponent(tb[:, -2], tb[:, -1], vb[:, -2], vb[:, -1])[:, None]

    def _rowvec(self, a, t):
        # (R, 1) -> broadcastable against t whose leading axis indexes points
        a = a[:, 0]
        return _col(a if a.shape[0] > 1 else np.full(1, a[0]), t)

    def evaluate(self, t):
        t = _prep(t, self.npoints)
        G = self.taus.shape[1]
        j = row_search(self.taus, t, side="right")
        jl = np.clip(j - 1, 0, G - 1)
        jr = np.clip(j, 0, G - 1)
        a, b = _take(self.taus, jl), _take(self.taus, jr)
        va, vb = _take(self.vals, jl), _take(self.vals, jr)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            w = np.log(t / a) / np.log(b / a)
            loglog = va * (vb / va) ** w
            linear = vb * (t - a) / (b - a)
            inner = np.where(np.isinf(vb), va, np.where(va > 0, loglog, linear))
            t0, v0 = _take(self.taus, np.zeros_like(j)), _take(self.vals, np.zeros_like(j))
            tL, vL = _take(self.taus, np.full_like(j, G - 1)), _take(self.vals, np.full_like(j, G - 1))
            head = np.where(v0 > 0, v0 * (t / t0) ** self._rowvec(self.head, t), 0.0)
            tail = vL * (t / tL) ** self._rowvec(self.tail, t)
        out = np.where(j == 0, head, np.where(j >= G, tail, inner))
        out = np.where(t == 0, 0.0, out)
        out = np.where(np.isnan(out), np.inf, out)
        return saturate(out, self.cap)

    def inverse(self, y):
        y = _prep(y, self.npoints)
        G = self.taus.shape[1]
        j = row_search(self.vals, y, side="left")
        jl = np.clip(j - 1, 0, G - 1)
        jr = np.clip(j, 0, G - 1)
        a, b = _take(self.taus, jl), _take(self.taus, jr)
        va, vb = _take(self.vals, jl), _take(self.vals, jr)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            loglog = a * (b / a) ** (np.log(y / va) / np.log(vb / va))
            linear = a + (y / vb) * (b - a)
            inner = np.where(np.isinf(vb) | (y == vb), b, np.where(va > 0, loglog, linear))
            t0, v0 = _take(self.taus, np.zeros_like(j)), _take(self.vals, np.zeros_like(j))
            tL, vL = _take(self.taus, np.full_like(j, G - 1)), _take(self.vals, np.full_like(j, G - 1))
            eh = self._rowvec(self.head, y)
            et = self._rowvec(self.tail, y)
            head = np.where((eh > 0) & np.isfinite(v0), t0 * (y / v0) ** (1.0 / eh), t0)
            tail = np.where(et > 0, tL * (y / vL) ** (1.0 / et), np.inf)
        out = np.where(j == 0, head, np.where(j >= G, tail, inner))
        return np.where(y <= 0, 0.0, out)


# --------------------------------------------------------------------------
# Phi-function specs


FAMILIES: dict[str, type] = {}
DERIVED: dict[str, type] = {}


def register(name: str, derived: bool = False):
    def deco(cls):
        cls.family = "derived" if derived else name
        cls.kind = name
        (DERIVED if derived else FAMILIES)[name] = cls
        return cls

    return deco


class PhiSpec:
    """Base class of all Phi-functions."""

    family: ClassVar[str] = "abstract"
    kind: ClassVar[str] = "abstract"
    domain: tuple | None = None

    # -- evaluation -------------------------------------------------------
    @property
    def x_independent(self) -> bool:
        return False

    @property
    def dim(self) -> int | None:
        return None if self.domain is None else len(self.domain)

    def check_points(self, points) -> np.ndarray:
        pts = as_points(points, self.dim)
        if self.domain is not None:
            box = np.asarray(self.domain)
            if pts.shape[1] != box.shape[0]:
                raise DomainError(f"points have dimension {pts.shape[1]}, domain has {box.shape[0]}")
            slack = 1e-12 * np.maximum(1.0, np.abs(box).max(axis=1))
            if np.any(pts < box[:, 0] - slack) or np.any(pts > box[:, 1] + slack):
                raise DomainError("point outside the domain of the Phi-function")
        return pts

    def bind(self, points) -> Bound:
        pts = self.check_points(points)
        if self.x_independent:
            b = self._bind(pts[:1])
            b.npoints = 1
            return b
        return self._bind(pts)

    def _bind(self, pts: np.ndarray) -> Bound:  # pragma: no cover - interface
        raise NotImplementedError

    def evaluate(self, x, t):
        return _pointwise(self, x, t, "evaluate")

    def inverse(self, x, t):
        return _pointwise(self, x, t, "inverse")

    # -- serialisation ----------------------------------------------------
    def to_dict(self) -> dict:  # pragma: no cover - interface
        raise NotImplementedError

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def spec_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def __repr__(self):
        return f"{type(self).__name__}({json.dumps(self.to_dict())[:120]})"


def _pointwise(phi: PhiSpec, x, t, method: str):
    """Evaluate at one point (any t shape) or many points (t rows per point)."""
    pts = phi.check_points(x)
    t = _check_t(t)
    bound = phi.bind(pts)
    if pts.shape[0] == 1:
        flat = t.reshape(1, -1)
        out = getattr(bound, method)(flat)
        return out.reshape(t.shape) if t.ndim else out.reshape(())[()]
    return getattr(bound, method)(t)


def _base_dict(spec, params, coeff=None):
    d = {"family": spec.family, "params": params, "coeff": coeff,
         "domain": None if spec.domain is None else [list(p) for p in spec.domain]}
    return d


@register("power")
@dataclass(frozen=True, eq=False, repr=False)
class Power(PhiSpec):
    """``c * w(x) * t**p``; the weight ``w`` is optional."""

    p: float
    c: float = 1.0
    weight: Coefficient | None = None
    domain: tuple | None = None

    def __post_init__(self):
        if not self.p > 0 or not self.c > 0:
            raise ArgumentError("power family needs p > 0 and c > 0")
        object.__setattr__(self, "domain", as_box(self.domain))

    @property
    def x_independent(self):
        return self.weight is None or self.weight.is_constant

    def _bind(self, pts):
        w = np.ones(pts.shape[0]) if self.weight is None else self.weight(pts)
        cw = self.c * w
        p = self.p

        def ev(t):
            return _col(cw, t) * t ** p

        def inv(y):
            c = _col(cw, y)
            return np.where(c > 0, (y / c) ** (1.0 / p), np.inf)

        return FunctionBound(pts.shape[0], ev, inv)

    def to_dict(self):
        coeff = None if self.weight is None else {"weight": self.weight.to_dict()}
        return _base_dict(self, {"p": self.p, "c": self.c}, coeff)

    @classmethod
    def from_dict(cls, d):
        w = (d.get("coeff") or {}).get("weight")
        return cls(d["params"]["p"], d["params"].get("c", 1.0), None if w is None else Coefficient.from_dict(w), d.get("domain"))


@register("orlicz_log")
@dataclass(frozen=True, eq=False, repr=False)
class OrliczLog(PhiSpec):
    """``t**p * log(e + t)``."""

    p: float
    domain: tuple | None = None

    def __post_init__(self):
        if not self.p >= 1:
            raise ArgumentError("orlicz_log needs p >= 1")
        object.__setattr__(self, "domain", as_box(self.domain))

    @property
    def x_independent(self):
        return True

    def _bind(self, pts):
        p = self.p
        return FunctionBound(pts.shape[0], lambda t: t ** p * np.log(np.e + t))

    def to_dict(self):
        return _base_dict(self, {"p": self.p})

    @classmethod
    def from_dict(cls, d):
        return cls(d["params"]["p"], d.get("domain"))


@register("variable_exponent")
@dataclass(frozen=True, eq=False, repr=False)
class VariableExponent(PhiSpec):
    """``t**p(x)`` with ``p(x) >= 1``."""

    exponent: Coefficient
    domain: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "exponent", _coef(self.exponent))
        object.__setattr__(self, "domain", as_box(self.domain))

    @property
    def x_independent(self):
        return self.exponent.is_constant

    def _bind(self, pts):
        px = self.exponent(pts)
        if np.any(px < 1):
            raise ArgumentError("variable exponent must satisfy p(x) >= 1")
        return FunctionBound(pts.shape[0], lambda t: t ** _col(px, t), lambda y: y ** (1.0 / _col(px, y)))

    def to_dict(self):
        return _base_dict(self, {}, {"p": self.exponent.to_dict()})

    @classmethod
    def from_dict(cls, d):
        return cls(Coefficient.from_dict(d["coeff"]["p"]), d.get("domain"))


def _double_phase_inverse(y, a, p, q):
    """Solve ``tau**p + a tau**q = y`` by Newton on log(tau).

    log phi(e^u) is convex in u, so Newton started right of the root
    (u0 = log(y)/p) decreases monotonically to it.
    """
    pos = (y > 0) & np.isfinite(y)
    ly = np.log(np.where(pos, y, 1.0))
    la = np.log(np.where(a > 0, a, 1.0))
    u = ly / p
    last = False
    for _ in range(60):
        A = p * u
        B = np.where(a > 0, la + q * u, -np.inf)
        m = np.maximum(A, B)
        ea, eb = np.exp(A - m), np.exp(B - m)
        g = m + np.log(ea + eb) - ly
        dg = (p * ea + q * eb) / (ea + eb)
        step = g / dg
        u = u - step
        if last:
            break
        # quadratic convergence: one more step after 1e-9 lands at rounding level
        last = bool(np.all(np.abs(step) <= 1e-9 * np.maximum(1.0, np.abs(u))))
    out = np.exp(u)
    return np.where(pos, out, np.where(y <= 0, 0.0, np.inf))


@register("double_phase")
@dataclass(frozen=True, eq=False, repr=False)
class DoublePhase(PhiSpec):
    """``t**p + a(x) t**q`` with ``a >= 0`` and ``1 <= p <= q``."""

    p: float
    q: float
    a: Coefficient
    domain: tuple | None = None

    def __post_init__(self):
        if not (1 <= self.p <= self.q):
            raise ArgumentError("double phase needs 1 <= p <= q")
        object.__setattr__(self, "a", _coef(self.a))
        object.__setattr__(self, "domain", as_box(self.domain))

    @property
    def x_independent(self):
        return self.a.is_constant

    def _bind(self, pts):
        ax = self.a(pts)
        if np.any(ax < 0):
            raise ArgumentError("double phase weight must be non-negative")
        p, q = self.p, self.q

        def ev(t):
            return t ** p + _col(ax, t) * t ** q

        def inv(y):
            return _double_phase_inverse(y, np.broadcast_to(_col(ax, y), y.shape), p, q)

        return FunctionBound(pts.shape[0], ev, inv)

    def to_dict(self):
        return _base_dict(self, {"p": self.p, "q": self.q}, {"a": self.a.to_dict()})

    @classmethod
    def from_dict(cls, d):
        return cls(d["params"]["p"], d["params"]["q"], Coefficient.from_dict(d["coeff"]["a"]), d.get("domain"))


@register("tabulated")
@dataclass(frozen=True, eq=False, repr=False)
class Tabulated(PhiSpec):
    """A Phi-function given by nodes ``(taus, values)``.

    ``values`` is 1-d (x-independent) or ``(cells, len(taus))`` with one row per
    cell of a uniform grid over ``sample_box`` (nearest-cell lookup).
    """

    taus: np.ndarray
    values: np.ndarray
    sample_box: tuple | None = None
    sample_resolution: tuple | None = None
    domain: tuple | None = None

    def __post_init__(self):
        taus = np.asarray(self.taus, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if taus.ndim != 1 or taus.size < 2 or np.any(np.diff(taus) <= 0) or taus[0] <= 0:
            raise ConstructionError("taus must be positive and strictly increasing")
        if vals.shape[-1] != taus.size:
            raise ConstructionError("values must have one entry per tau")
        with np.errstate(invalid="ignore"):
            bad = np.any(vals < 0) or np.any(np.diff(vals, axis=-1) < 0)
        if bad:
            raise ConstructionError("tabulated values must be non-negative and non-decreasing")
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "domain", as_box(self.domain))
        if vals.ndim == 2:
            object.__setattr__(self, "sample_box", as_box(self.sample_box))
            object.__setattr__(self, "sample_resolution", tuple(int(r) for r in self.sample_resolution))

    @property
    def x_independent(self):
        return self.values.ndim == 1

    def _bind(self, pts):
        if self.values.ndim == 1:
            return TableBound(self.taus[None], self.values[None], npoints=pts.shape[0])
        rows = Coefficient("samples", {"box": self.sample_box, "resolution": self.sample_resolution,
                                       "values": np.arange(self.values.shape[0], dtype=float)})(pts).astype(int)
        return TableBound(self.taus[None], self.values[rows])

    def to_dict(self):
        params = {"taus": self.taus.tolist(), "values": self.values.tolist()}
        if self.values.ndim == 2:
            params["sample_box"] = [list(p) for p in self.sample_box]
            params["sample_resolution"] = list(self.sample_resolution)
        return _base_dict(self, params)

    @classmethod
    def from_dict(cls, d):
        P = d["params"]
        return cls(np.asarray(P["taus"]), np.asarray(P["values"]), P.get("sample_box"), P.get("sample_resolution"), d.get("domain"))


# --------------------------------------------------------------------------
# derived forms


class Derived(PhiSpec):
    parents: tuple = ()

    @property
    def x_independent(self):
        return all(p.x_independent for p in self.parents)

    def _params(self) -> dict:
        return {}

    def record(self) -> dict:
        return {"kind": self.kind, "parameters": self._params(),
                "parent_hash": [p.spec_hash() for p in self.parents]}

    def to_dict(self):
        return {"family": "derived", "kind": self.kind, "params": self._params(),
                "parents": [p.to_dict() for p in self.parents],
                "domain": None if self.domain is None else [list(p) for p in self.domain],
                "record": self.record()}


def _inherit_domain(parents):
    for p in parents:
        if p.domain is not None:
            return p.domain
    return None


def _tab_from(d) -> Tabulation:
    return Tabulation(**d) if d else DEFAULT_TAB


def legendre_rows(s: np.ndarray, V: np.ndarray, parent: Bound | None = None) -> np.ndarray:
    """Discrete Legendre transform ``sup_{s>0} s t - V(s)`` at ``t = s``.

    ``V`` holds one row of parent values per point on the shared grid ``s``.
    The sup is exact over the grid vertices; when ``parent`` is given, convex
    rows are refined by one parabolic step evaluated with the parent, and the
    end power laws of each row decide whether the sup escapes the grid.
    """
    V = np.atleast_2d(V).astype(float)
    R, G = V.shape
    t = s
    with np.errstate(invalid="ignore", over="ignore"):
        d = np.diff(V, axis=1) / np.diff(s)
    a, b = d[:, :-1], d[:, 1:]
    with np.errstate(invalid="ignore"):
        convex = np.all((b >= a) | (b >= a - 1e-9 * np.abs(a)), axis=1)
    Vh = V.copy()
    for r in np.nonzero(~convex)[0]:
        Vh[r] = _convex_minorant(s, V[r])
    if not convex.all():
        with np.errstate(invalid="ignore", over="ignore"):
            d = np.diff(Vh, axis=1) / np.diff(s)
    d = np.where(np.isnan(d), np.inf, d)
    d = np.maximum.accumulate(d, axis=1)
    tt = np.broadcast_to(t, (R, G))
    k = row_search(d, tt, side="left")  # number of slopes < t
    sk = s[k]
    with np.errstate(invalid="ignore", over="ignore"):
        best = sk * tt - np.take_along_axis(Vh, k, axis=1)
    best = np.where(np.isnan(best), -np.inf, best)

    if parent is not None:
        inner = (k > 0) & (k < G - 1) & convex[:, None]
        km, kp = np.clip(k - 1, 0, G - 1), np.clip(k + 1, 0, G - 1)
        x0, x1, x2 = s[km], sk, s[kp]
        y0 = x0 * tt - np.take_along_axis(V, km, axis=1)
        y1 = best
        y2 = x2 * tt - np.take_along_axis(V, kp, axis=1)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            h0, h1 = x1 - x0, x2 - x1
            d0, d1 = (y1 - y0) / h0, (y2 - y1) / h1
            slope = (d0 * h1 + d1 * h0) / (h0 + h1)
            curv = 2.0 * (d1 - d0) / (h0 + h1)
            star = np.where(curv < 0, x1 - slope / curv, x1)
        inner &= np.isfinite(star) & np.isfinite(y0) & np.isfinite(y2)
        star = np.where(inner, np.clip(star, x0, x2), x1)
        if inner.any():
            with np.errstate(invalid="ignore", over="ignore"):
                g = star * tt - parent.evaluate(star if R > 1 else star[:1])
            best = np.where(inner & (g > best), g, best)

    # end power laws
    e0 = _end_exponent(s[0], s[1], V[:, 0], V[:, 1])[:, None]
    eL = _end_exponent(s[-2], s[-1], V[:, -2], V[:, -1])[:, None]
    v0, vL = V[:, :1], V[:, -1:]
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        sh = s[0] * (tt * s[0] / (e0 * v0)) ** (1.0 / (e0 - 1.0))
        head = np.where((e0 > 1) & (v0 > 0) & (sh <= s[1]), tt * sh * (1.0 - 1.0 / e0), -np.inf)
        st = s[-1] * (tt * s[-1] / (eL * vL)) ** (1.0 / (eL - 1.0))
        tail_pow = np.where((eL > 1) & (st >= s[-1]), tt * st * (1.0 - 1.0 / eL), -np.inf)
        escapes = (eL <= 1) & np.isfinite(vL) & (tt > eL * vL / s[-1])
        tail = np.where(np.isfinite(vL), np.where(escapes, np.inf, tail_pow), -np.inf)
    head = np.where(np.isnan(head), -np.inf, head)
    tail = np.where(np.isnan(tail), -np.inf, tail)
    out = np.maximum(np.maximum(best, 0.0), np.maximum(head, tail))
    return out


def _convex_minorant(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Greatest convex minorant of the finite nodes, evaluated on ``s``."""
    fin = np.nonzero(np.isfinite(v))[0]
    xs = np.concatenate([[0.0], s[fin]])
    ys = np.concatenate([[0.0], v[fin]])
    hull: list[int] = []
    for i in range(len(xs)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (xs[i1] - xs[i0]) * (ys[i] - ys[i0]) - (ys[i1] - ys[i0]) * (xs[i] - xs[i0])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    out = np.full_like(v, np.inf)
    last = s[fin[-1]] if fin.size else -1.0
    mask = s <= last
    out[mask] = np.interp(s[mask], xs[hull], ys[hull])
    return out


@register("conjugate", derived=True)
@dataclass(frozen=True, eq=False, repr=False)
class Conjugate(Derived):
    """Pointwise Legendre conjugate ``sup_{s>0} s t - phi(x, s)``, tabulated."""

    parent: PhiSpec
    tab: Tabulation = DEFAULT_TAB

    def __post_init__(self):
        object.__setattr__(self, "parents", (self.parent,))
        object.__setattr__(self, "domain", self.parent.domain)

    def _params(self):
        return {"tab": self.tab.to_dict()}

    def _bind(self, pts):
        s = self.tab.grid()
        pb = self.parent._bind(pts)
        R = pts.shape[0]
        V = pb.evaluate(np.broadcast_to(s, (R, s.size)).copy())
        V = np.maximum.accumulate(V, axis=1)
        if np.any(np.isnan(V)):
            raise ConstructionError("non-monotone tabulation of the parent")
        C = legendre_rows(s, V, pb)
        return TableBound(s[None], C, cap=self.tab.cap)

    @classmethod
    def from_dict(cls, d):
        return cls(phi_from_dict(d["parents"][0]), _tab_from(d["params"].get("tab")))


@register("inverse", derived=True)
@dataclass(frozen=True, eq=False, repr=False)
class Inverse(Derived):
    """``t -> phi^{-1}(x, t)`` viewed as a function in its own right."""

    parent: PhiSpec

    def __post_init__(self):
        object.__setattr__(self, "parents", (self.parent,))
        object.__setattr__(self, "domain", self.parent.domain)

    def _bind(self, pts):
        pb = self.parent._bind(pts)
        return FunctionBound(pts.shape[0], pb.inverse)

    @classmethod
    def from_dict(cls, d):
        return cls(phi_from_dict(d["parents"][0]))


@register("power_scaled", derived=True)
@dataclass(frozen=True, eq=False, repr=False)
class PowerScaled(Derived):
    """``phi(x, t**(1/s))``; its inverse is ``phi^{-1}(x, t)**s``."""

    parent: PhiSpec
    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise ArgumentError("power scaling needs s > 0")
        object.__setattr__(self, "parents", (self.parent,))
        object.__setattr__(self, "domain", self.parent.domain)

    def _params(self):
        return {"s": self.s}

    def _bind(self, pts):
        pb = self.parent._bind(pts)
        s = self.s
        return FunctionBound(pts.shape[0], lambda t: pb.evaluate(t ** (1.0 / s)), lambda y: pb.inverse(y) ** s)

    @classmethod
    def from_dict(cls, d):
        return cls(phi_from_dict(d["parents"][0]), d["params"]["s"])


@register("max_combined", derived=True)
@dataclass(frozen=True, eq=False, repr=False)
class MaxCombined(Derived):
    """``max(phi_1, ..., phi_k, slope*t + intercept)``, clipped at 0."""

    members: tuple
    affine: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "parents", self.members)
        object.__setattr__(self, "domain", _inherit_domain(self.members))
        if self.affine is not None and not self.affine[0] > 0:
            raise ArgumentError("affine member needs a positive slope")

    def _params(self):
        return {"affine": None if self.affine is None else list(self.affine)}

    def _bind(self, pts):
        bs = [m._bind(pts) for m in self.members]
        aff = self.affine

        def ev(t):
            out = np.maximum.reduce([b.evaluate(t) for b in bs])
            if aff is not None:
                out = np.maximum(out, aff[0] * t + aff[1])
            return out

        def inv(y):
            out = np.minimum.reduce([b.inverse(y) for b in bs])
            if aff is not None:
                out = np.minimum(out, np.maximum((y - aff[1]) / aff[0], 0.0))
            return out

        return FunctionBound(pts.shape[0], ev, inv)

    @classmethod
    def from_dict(cls, d):
        aff = d["params"].get("affine")
        return cls(tuple(phi_from_dict(p) for p in d["parents"]), None if aff is None else tuple(aff))


# --------------------------------------------------------------------------
# public operations


def phi_from_dict(d: dict) -> PhiSpec:
    """Rebuild a Phi-function from its JSON object."""
    if d["family"] == "derived":
        try:
            cls = DERIVED[d["kind"]]
        except KeyError:
            raise ArgumentError(f"unknown derived kind {d['kind']!r}") from None
        return cls.from_dict(d)
    try:
        cls = FAMILIES[d["family"]]
    except KeyError:
        raise ArgumentError(f"unknown family {d['family']!r}") from None
    return cls.from_dict(d)


def load_phi(path) -> PhiSpec:
    with open(path) as fh:
        return phi_from_dict(json.load(fh))


def evaluate(phi: PhiSpec, x, t):
    """``phi(x, t)``; exact for parametric families, interpolated for tables."""
    return phi.evaluate(x, t)


def inverse(phi: PhiSpec, x, t):
    """Generalised inverse ``inf{tau : phi(x, tau) >= t}``."""
    return phi.inverse(x, t)


def conjugate(phi: PhiSpec, tab: Tabulation = DEFAULT_TAB) -> Conjugate:
    return Conjugate(phi, tab)


def power(p: float, c: float = 1.0, domain=None) -> Power:
    return Power(p, c, None, domain)


def double_phase(p: float, q: float, a, domain=None) -> DoublePhase:
    return DoublePhase(p, q, _coef(a), domain)


def variable_exponent(p, domain=None) -> VariableExponent:
    return VariableExponent(_coef(p), domain)
