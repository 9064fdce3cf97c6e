"""Modulars, Luxemburg norms, characteristic-function norms and pairings."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .grid import Cube, Grid, GridFunction
from .phi import Conjugate, PhiSpec


class NumericalError(RuntimeError):
    """Bisection failed to converge; carries the last bracket."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


@dataclass
class NormResult:
    value: float
    iterations: int
    bracket: tuple
    modular_at_value: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bracket"] = list(self.bracket)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _support(f: GridFunction):
    v = f.flat
    nz = np.nonzero(v)[0]
    pts = f.grid.points()[nz]
    return pts, np.abs(v[nz])


def _fsum_ext(vals: np.ndarray) -> float:
    if np.any(np.isinf(vals)):
        return math.inf
    return math.fsum(vals.tolist())


class _Modular:
    """``lambda -> int phi(x, |f(x)|/lambda) dx`` with phi bound once at the support.

    A :class:`GridNorm` may supply a bound over every grid point instead.
    """

    def __init__(self, phi: PhiSpec, f: GridFunction, full=None):
        self.vol = f.grid.cell_volume
        if full is not None:
            self.vals = np.abs(f.flat)
            self.bound = full if np.any(self.vals) else None
            if self.bound is None:
                self.vals = self.vals[:0]
            return
        self.pts, self.vals = _support(f)
        self.bound = phi.bind(self.pts) if self.vals.size else None

    def __call__(self, lam: float) -> float:
        if self.vals.size == 0:
            return 0.0
        return _fsum_ext(self.bound.evaluate(self.vals / lam)) * self.vol

    def beta(self) -> float:
        c = self.bound.inverse(np.ones(self.bound.npoints))
        with np.errstate(divide="ignore"):
            b = np.minimum(c, 1.0 / c)
        return float(np.nanmin(b)) if b.size else 1.0


def modular(phi: PhiSpec, f: GridFunction) -> float:
    """``sum_i phi(x_i, |f_i|) |cell|``; +inf when any term is infinite."""
    return _Modular(phi, f)(1.0)


def luxemburg_norm(phi: PhiSpec, f: GridFunction, tol: float = 1e-10, max_iter: int = 200,
                   _full=None) -> NormResult:
    """``inf{lambda > 0 : modular(f / lambda) <= 1}`` by geometric bisection.

    The upper end starts at ``max|f| * max(1, 1/beta)`` with beta read from
    ``phi^{-1}(x, 1)`` on the support, the lower end ``2**-60`` below; both
    are moved by doubling until the modular straddles 1.
    """
    rho = _Modular(phi, f, _full)
    if rho.vals.size == 0:
        return NormResult(0.0, 0, (0.0, 0.0), 0.0)
    beta = rho.beta()
    hi = float(rho.vals.max()) * max(1.0, 1.0 / beta if beta > 0 else 1e30)
    it = 0
    while rho(hi) > 1.0:
        hi *= 2.0
        it += 1
        if it > max_iter:
            raise NumericalError("could not find an upper bracket", (None, hi))
    # clamp to the smallest subnormal so tiny inputs still get a positive bracket
    lo = max(hi * 2.0 ** -60, math.ulp(0.0))
    while rho(lo) <= 1.0:
        lo *= 0.5
        it += 1
        if it > max_iter or lo == 0.0:
            raise NumericalError("could not find a lower bracket", (lo, hi))
    while hi / lo - 1.0 > tol:
        mid = math.sqrt(lo * hi)
        if mid <= lo or mid >= hi:
            break
        if rho(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
        it += 1
        if it > max_iter:
            raise NumericalError("bisection did not converge", (lo, hi))
    return NormResult(hi, it, (lo, hi), rho(hi))


class GridNorm:
    """Luxemburg norms under one phi for many functions on one grid.

    phi is bound once at every cell centre, which pays off for derived
    Phi-functions whose binding is expensive.
    """

    def __init__(self, phi: PhiSpec, grid: Grid):
        self.phi, self.grid = phi, grid
        self.bound = phi.bind(grid.points())

    def _check(self, f: GridFunction):
        if f.grid != self.grid:
            raise ValueError("function lives on a different grid")

    def modular(self, f: GridFunction) -> float:
        self._check(f)
        return _Modular(self.phi, f, self.bound)(1.0)

    def norm(self, f: GridFunction, tol: float = 1e-10, max_iter: int = 200) -> NormResult:
        self._check(f)
        return luxemburg_norm(self.phi, f, tol, max_iter, _full=self.bound)

    def __call__(self, f: GridFunction) -> float:
        return self.norm(f).value


def indicator(grid: Grid, Q: Cube) -> GridFunction:
    v = np.zeros(grid.shape)
    v[Q.slices()] = 1.0
    return GridFunction(grid, v)


def cube_char_norm(phi: PhiSpec, Q: Cube, grid: Grid) -> float:
    """``||chi_Q||_phi``; closed form ``1/phi^{-1}(1/|Q|)`` when phi ignores x."""
    vol = Q.volume(grid)
    if phi.x_independent:
        x = np.asarray(grid.points()[0])
        return float(1.0 / phi.bind(x[None]).inverse(np.array([1.0 / vol]))[0])
    return luxemburg_norm(phi, indicator(grid, Q)).value


def measure_scaling_value(phi: PhiSpec, Q: Cube, grid: Grid) -> float:
    """``1 / mean_Q phi^{-1}(x, 1/|Q|)`` by midpoint quadrature over Q."""
    vol = Q.volume(grid)
    mask = indicator(grid, Q).flat > 0
    pts = grid.points()[mask]
    inv = phi.bind(pts).inverse(np.full(pts.shape[0] if not phi.x_independent else 1, 1.0 / vol))
    inv = np.broadcast_to(inv, (pts.shape[0],))
    return 1.0 / (math.fsum(inv.tolist()) / pts.shape[0])


def pairing(f: GridFunction, g: GridFunction) -> float:
    """``int f g``."""
    return math.fsum((f.flat * g.flat).tolist()) * f.grid.cell_volume


def default_dictionary(f: GridFunction, phi: PhiSpec) -> list[GridFunction]:
    """Test functions for the associate-norm lower bound."""
    v = f.values
    a = np.abs(v)
    sg = np.sign(v)
    out = []
    for k in (0.0, 0.5, 1.0, 2.0):
        out.append(f.with_values(sg * a ** k))
    nz = a[a > 0]
    for q in (0.25, 0.5, 0.75, 0.9):
        if nz.size:
            out.append(f.with_values(sg * (a >= np.quantile(nz, q))))
    # phi(x, t)/t at the normalised function approximates the Young extremal
    lam = luxemburg_norm(phi, f).value
    if lam > 0:
        pts = f.grid.points()
        t = a.ravel() / lam
        with np.errstate(divide="ignore", invalid="ignore"):
            d = phi.bind(pts).evaluate(t) / t if not phi.x_independent else phi.bind(pts[:1]).evaluate(t) / t
        d = np.where(t > 0, d, 0.0)
        if np.all(np.isfinite(d)):
            out.append(f.with_values(sg * d.reshape(v.shape)))
    return [g for g in out if np.any(g.values)]


def associate_lower_bound(f: GridFunction, phi: PhiSpec, dictionary=None, conj: PhiSpec | None = None) -> float:
    """``max_g |int f g|`` over dictionary functions scaled to unit conjugate norm."""
    conj = Conjugate(phi) if conj is None else conj
    gs = default_dictionary(f, phi) if dictionary is None else dictionary
    best = 0.0
    for g in gs:
        ng = luxemburg_norm(conj, g).value
        if ng > 0 and math.isfinite(ng):
            best = max(best, abs(pairing(f, g)) / ng)
    return best
