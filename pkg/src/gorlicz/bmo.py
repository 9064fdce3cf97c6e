"""BMO seminorm, positive/negative parts and commutator-based BMO detectors."""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.ndimage import maximum_filter1d

from .conditions import check_A0, check_A1, check_A2, check_aInc
from .grid import Accumulator, Cube, CubeFamily, GridFunction
from .norms import cube_char_norm, luxemburg_norm
from .operators import _layer_sums
from .phi import PhiSpec, PreconditionError


@dataclass
class BMOReport:
    seminorm: float
    witness_cube: dict | None
    per_scale: dict = field(default_factory=dict)
    l1_condition_value: float | None = None
    detector_value: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_scale"] = {str(k): v for k, v in self.per_scale.items()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _oscillations(b: GridFunction, layer) -> tuple[list, np.ndarray]:
    """Mean oscillation of every cube of one layer, as ``sum |c b_y - S| / c**2``."""
    acc = Accumulator(b)
    axes, S = _layer_sums(acc, layer, absolute=False)
    n = b.grid.n
    c = float(layer.side ** n)
    v = b.values
    osc = np.zeros(S.shape)
    for d in itertools.product(range(layer.side), repeat=n):
        y = v[np.ix_(*[a + dd for a, dd in zip(axes, d)])] if n > 1 else v[axes[0] + d[0]]
        osc += np.abs(c * y - S)
    return axes, osc / (c * c)


def bmo_seminorm(b: GridFunction, family: CubeFamily) -> BMOReport:
    """``sup_Q (1/|Q|) int_Q |b - b_Q|`` over the family, with per-side maxima."""
    best, wit, per = -1.0, None, {}
    for layer in family.layers:
        axes, osc = _oscillations(b, layer)
        k = np.unravel_index(int(np.argmax(osc)), osc.shape)
        val = float(osc[k])
        per[layer.side] = max(per.get(layer.side, 0.0), val)
        if val > best:
            best = val
            wit = Cube(tuple(int(a[i]) for a, i in zip(axes, k)), layer.side).to_dict()
    return BMOReport(best, wit, per)


def parts(b: GridFunction) -> tuple[GridFunction, GridFunction]:
    """``(b+, b-)`` with ``b+ = max(b, 0)`` and ``b- = -min(b, 0)``."""
    v = b.values
    return b.with_values(np.maximum(v, 0.0)), b.with_values(-np.minimum(v, 0.0))


# --------------------------------------------------------------------------
# restricted maximal functions on one cube


def local_maximal(b: GridFunction, Q: Cube, family: CubeFamily, alpha: float = 0.0) -> np.ndarray:
    """``|Q|**(-alpha/n) M_{alpha,Q}|b|`` on the cells of Q.

    Uses family cubes inside Q plus every single cell.  Written in cell
    counts: a subcube Q' contributes ``(c'/c)**(alpha/n) S'/c'``.
    """
    n = b.grid.n
    sub = np.abs(b.values[Q.slices()]).astype(np.longdouble)
    c = float(Q.side ** n)
    P = sub
    for ax in range(n):
        P = np.cumsum(P, axis=ax)
    P = np.pad(P, [(1, 0)] * n)
    an = alpha / n
    best = np.full(sub.shape, -np.inf)
    layers = {(l.side, l.stride) for l in family.layers if l.side <= Q.side}
    layers.add((1, 1))
    for side, stride in sorted(layers):
        # relative anchors of this layer's cubes inside Q, per axis
        axes = []
        for a in Q.anchor:
            off = (-a) % stride
            axes.append(np.arange(off, Q.side - side + 1, stride))
        if any(len(x) == 0 for x in axes):
            continue
        mesh = np.meshgrid(*axes, indexing="ij")
        lo = [m for m in mesh]
        if n == 1:
            S = P[lo[0] + side] - P[lo[0]]
        else:
            S = P[lo[0] + side, lo[1] + side] - P[lo[0], lo[1] + side] - P[lo[0] + side, lo[1]] + P[lo[0], lo[1]]
        cp = float(side ** n)
        V = (cp / c) ** an * (S.astype(np.float64) / cp)
        out = V
        for ax in range(n):
            N = Q.side
            if stride == 1:
                pad = [(0, 0)] * n
                pad[ax] = (side - 1, side - 1)
                Pd = np.pad(out, pad, constant_values=-np.inf)
                M = maximum_filter1d(Pd, side, axis=ax, mode="constant", cval=-np.inf)
                out = np.take(M, np.arange(side // 2, side // 2 + N), axis=ax)
            else:
                i = np.arange(N)
                k = (i - axes[ax][0]) // stride
                ok = (i >= axes[ax][0]) & (k < out.shape[ax])
                G = np.take(out, np.clip(k, 0, out.shape[ax] - 1), axis=ax)
                shape = [1] * n
                shape[ax] = N
                out = np.where(ok.reshape(shape), G, -np.inf)
        best = np.maximum(best, out)
    return best


def l1_maximal_condition(b: GridFunction, family: CubeFamily) -> float:
    """``sup_Q (1/|Q|) int_Q |b - M_Q b|``."""
    best = 0.0
    for Q in family.cubes():
        m = local_maximal(b, Q, family)
        dev = np.abs(b.values[Q.slices()] - m)
        best = max(best, float(np.sum(dev)) / dev.size)
    return best


# --------------------------------------------------------------------------
# detectors


def run_checks(eta: PhiSpec, p: float = 1.1) -> dict:
    return {"A0": check_A0(eta), "A1": check_A1(eta), "A2": check_A2(eta), "aInc": check_aInc(eta, p)}


def _require_checks(eta: PhiSpec, checks: dict | None, p: float):
    checks = run_checks(eta, p) if checks is None else checks
    bad = {k: r for k, r in checks.items() if getattr(r, "verdict", r) != "pass"}
    if bad:
        raise PreconditionError("eta fails the maximal-boundedness checks: " + ", ".join(sorted(bad)), bad)


def _detector(b: GridFunction, eta: PhiSpec, family: CubeFamily, alpha: float, cubes=None) -> tuple[float, dict | None]:
    grid = b.grid
    best, wit = 0.0, None
    for Q in (family.cubes() if cubes is None else cubes):
        m = local_maximal(b, Q, family, alpha)
        dev = np.zeros(grid.shape)
        dev[Q.slices()] = b.values[Q.slices()] - m
        num = luxemburg_norm(eta, GridFunction(grid, dev)).value
        if num == 0.0:
            continue
        r = num / cube_char_norm(eta, Q, grid)
        if r > best:
            best, wit = r, Q.to_dict()
    return best, wit


def detector_fractional(b: GridFunction, eta: PhiSpec, alpha: float, family: CubeFamily,
                        checks: dict | None = None, p: float = 1.1, cubes=None) -> float:
    """``sup_Q ||(b - |Q|^{-alpha/n} M_{alpha,Q} b) chi_Q||_eta / ||chi_Q||_eta``.

    ``eta`` must pass (A0), (A1), (A2) and (aInc)_p; pass precomputed
    ``checks`` to skip re-running the checkers.
    """
    _require_checks(eta, checks, p)
    return _detector(b, eta, family, alpha, cubes)[0]


def detector_plain(b: GridFunction, psi: PhiSpec, family: CubeFamily, checks: dict | None = None,
                   p: float = 1.1, cubes=None) -> float:
    """``sup_Q ||(b - M_Q b) chi_Q||_psi / ||chi_Q||_psi``."""
    _require_checks(psi, checks, p)
    return _detector(b, psi, family, 0.0, cubes)[0]
