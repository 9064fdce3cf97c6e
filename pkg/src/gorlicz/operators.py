"""Maximal, sharp maximal, commutator and Riesz-type operators on grid functions.

Suprema over cubes are maxima over an enumerated :class:`~gorlicz.grid.CubeFamily`.
Each family layer (cubes of one side) is handled at once: cube values are
computed for every anchor from prefix sums, then spread to the cells they
contain with a separable sliding-window maximum (sliding layers) or a plain
gather (partition layers).

The weight of a cube Q is ``|Q|**(alpha/n - 1)``; ``alpha = 0`` gives the
plain averages, so :func:`hl_maximal` is literally :func:`fractional_maximal`
at ``alpha = 0``.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as spi
from scipy.ndimage import maximum_filter1d
from scipy.signal import convolve

from .grid import Accumulator, Cube, CubeFamily, Grid, GridFunction, Layer
from .phi import ArgumentError

PAIR_CAP = 2 ** 26


class CapExceeded(RuntimeError):
    """Direct Riesz summation would exceed the pair cap."""


@dataclass
class OperatorOutput:
    result: GridFunction
    argmax_cube: dict | None = None
    timing: dict = field(default_factory=dict)

    @property
    def values(self) -> np.ndarray:
        return self.result.values


def _check_alpha(alpha: float, n: int, open_left: bool = False):
    lo_ok = alpha > 0 if open_left else alpha >= 0
    if not (lo_ok and alpha < n):
        rng = "(0, n)" if open_left else "[0, n)"
        raise ArgumentError(f"alpha must lie in {rng}, got {alpha}")


def _same_grid(*fs):
    g = fs[0].grid
    for f in fs[1:]:
        if f.grid != g:
            raise ArgumentError("functions live on different grids")
    return g


def cube_weight(count: int, grid: Grid, alpha: float) -> float:
    """``|Q|**(alpha/n - 1)`` for a cube of ``count`` cells."""
    return (count * grid.cell_volume) ** (alpha / grid.n - 1.0)


# --------------------------------------------------------------------------
# layer machinery


def _anchor_lattice(layer: Layer, grid: Grid) -> list[np.ndarray]:
    return [layer.anchors_1d(N) for N in grid.resolution]


def _anchor_mask(axes, layer: Layer, anchor_box: Cube | None):
    if anchor_box is None:
        return None
    masks = [(a >= lo) & (a + layer.side <= lo + anchor_box.side) for a, lo in zip(axes, anchor_box.anchor)]
    return np.ix_(*masks) if len(masks) > 1 else masks[0]


def _layer_sums(acc: Accumulator, layer: Layer, absolute: bool = True):
    grid = acc.grid
    axes = _anchor_lattice(layer, grid)
    mesh = np.meshgrid(*axes, indexing="ij")
    lo = np.stack([m.ravel() for m in mesh], axis=1)
    S = acc.box_sums(lo, lo + layer.side, absolute).astype(np.float64)
    return axes, S.reshape(tuple(len(a) for a in axes))


def _spread(V: np.ndarray, layer: Layer, shape) -> np.ndarray:
    """Per cell, the max of V over the layer's cubes containing the cell (-inf if none).

    ``shape`` is the extent of the cell block whose first cell is the first
    anchor of V.
    """
    s = layer.side
    out = V
    for ax, N in enumerate(shape):
        if layer.stride == 1:
            pad = [(0, 0)] * out.ndim
            pad[ax] = (s - 1, s - 1)
            P = np.pad(out, pad, constant_values=-np.inf)
            M = maximum_filter1d(P, s, axis=ax, mode="constant", cval=-np.inf)
            out = np.take(M, np.arange(s // 2, s // 2 + N), axis=ax)
        else:
            k = np.arange(N) // layer.stride
            ok = k < out.shape[ax]
            G = np.take(out, np.minimum(k, out.shape[ax] - 1), axis=ax)
            shape = [1] * out.ndim
            shape[ax] = N
            out = np.where(ok.reshape(shape), G, -np.inf)
    return out


def _witness(best_val, best_layer, layers, layer_vals, grid):
    """Recover, per cell, an anchor of a cube attaining the maximum."""
    n = grid.n
    anchor = np.full(grid.shape + (n,), -1, dtype=int)
    side = np.zeros(grid.shape, dtype=int)
    idx = np.stack(np.meshgrid(*[np.arange(N) for N in grid.resolution], indexing="ij"), -1)
    for li, (layer, V) in enumerate(zip(layers, layer_vals)):
        sel = best_layer == li
        if not sel.any():
            continue
        X = idx[sel]
        target = best_val[sel]
        found = np.zeros(X.shape[0], dtype=bool)
        A = np.full(X.shape, -1, dtype=int)
        for d in itertools.product(range(layer.side), repeat=n):
            a = X - np.asarray(d)
            ok = ~found & np.all(a >= 0, axis=1) & np.all(a % layer.stride == 0, axis=1)
            k = a // layer.stride
            ok &= np.all(k < np.asarray(V.shape), axis=1)
            if not ok.any():
                continue
            kk = np.where(ok[:, None], k, 0)
            hit = ok & (V[tuple(kk.T)] == target)
            A[hit] = a[hit]
            found |= hit
            if found.all():
                break
        anchor[sel] = A
        side[sel] = layer.side
    return {"anchor": anchor, "side": side}


def _layered_max(grid, family: CubeFamily, cube_values, witness=False, anchor_box=None, layers=None):
    """Max over family cubes containing each cell of ``cube_values(layer) -> (axes, V)``."""
    best = np.full(grid.shape, -np.inf)
    best_layer = np.full(grid.shape, -1, dtype=int)
    vals = []
    layers = family.layers if layers is None else layers
    for li, layer in enumerate(layers):
        axes, V = cube_values(layer)
        m = _anchor_mask(axes, layer, anchor_box)
        if m is not None:
            V = V.copy()
            keep = np.zeros(V.shape, dtype=bool)
            keep[m] = True
            V[~keep] = -np.inf
        vals.append(V)
        R = _spread(V, layer, grid.resolution)
        upd = R > best
        best = np.where(upd, R, best)
        best_layer = np.where(upd, li, best_layer)
    wit = _witness(best, best_layer, layers, vals, grid) if witness else None
    return best, wit


# --------------------------------------------------------------------------
# maximal operators


def fractional_maximal(f: GridFunction, alpha: float, family: CubeFamily, centered: bool = False,
                       witness: bool = False, anchor_box: Cube | None = None) -> OperatorOutput:
    """``sup_{Q ni x} |Q|**(alpha/n - 1) int_Q |f|`` over the family.

    ``centered`` uses cubes of side ``2r + 1`` centred at the cell for r in the
    family's centred radii (zero extension outside the grid).  ``anchor_box``
    keeps only cubes inside that cube (the restricted maximal function).
    """
    grid = f.grid
    _check_alpha(alpha, grid.n)
    if family.grid != grid:
        raise ArgumentError("family built on a different grid")
    t0 = time.perf_counter()
    acc = Accumulator(f)
    vol = grid.cell_volume
    if centered:
        out = _centered(acc, alpha, family.centered_radii)
        wit = None
    elif not witness and anchor_box is None:
        out, wit = _sparse_max(acc, alpha, family), None
    else:
        def values(layer):
            axes, S = _layer_sums(acc, layer)
            w = cube_weight(layer.side ** grid.n, grid, alpha)
            return axes, w * (S * vol)

        out, wit = _layered_max(grid, family, values, witness, anchor_box)
    out = np.where(np.isneginf(out), 0.0, out)
    return OperatorOutput(f.with_values(out, extended=False), wit, {"total": time.perf_counter() - t0})


def _block_max(T, sup_lo, sup_shape, win_lo, win_shape, grid: Grid, alpha: float,
               family: CubeFamily) -> np.ndarray:
    """Layered maxima for a batch of compactly supported functions.

    Function b is supported in the cell block ``[sup_lo[b], sup_lo[b] + sup_shape)``
    with absolute prefix-sum table ``T[b]``; its maximal function is returned on
    the block ``[win_lo[b], win_lo[b] + win_shape)``.  Only cubes meeting both
    blocks are visited.  Every other cube has value 0 and all values are
    non-negative, so the result equals the full-grid computation.
    """
    n = grid.n
    B = T.shape[0]
    sup_lo, win_lo = np.asarray(sup_lo, dtype=int), np.asarray(win_lo, dtype=int)
    out = np.zeros((B,) + tuple(win_shape))
    vol = grid.cell_volume
    bi = np.arange(B).reshape((B,) + (1,) * n)
    for layer in family.layers:
        s, st = layer.side, layer.stride
        ks, oks, clo, chi = [], [], [], []
        for ax, N in enumerate(grid.resolution):
            sl, sh = sup_lo[:, ax], sup_lo[:, ax] + sup_shape[ax]
            L = np.maximum(sl, win_lo[:, ax])
            H = np.minimum(sh, win_lo[:, ax] + win_shape[ax])
            kmin = np.maximum(0, (L - s) // st + 1)
            kmax = np.minimum((N - s) // st, (H - 1) // st)
            K = int(np.max(kmax - kmin)) + 1
            if K <= 0:
                break
            k = kmin[:, None] + np.arange(K)[None, :]
            a = k * st
            shape = [B] + [1] * n
            shape[ax + 1] = K
            ks.append(kmin)
            oks.append((k <= kmax[:, None]).reshape(shape))
            clo.append(np.clip(a - sl[:, None], 0, sup_shape[ax]).reshape(shape))
            chi.append(np.clip(a + s - sl[:, None], 0, sup_shape[ax]).reshape(shape))
        if len(ks) < n:
            continue
        if n == 1:
            S = T[bi, chi[0]] - T[bi, clo[0]]
            ok = oks[0]
        else:
            S = T[bi, chi[0], chi[1]] - T[bi, clo[0], chi[1]] - T[bi, chi[0], clo[1]] + T[bi, clo[0], clo[1]]
            ok = oks[0] & oks[1]
        V = np.where(ok, cube_weight(s ** n, grid, alpha) * (S.astype(np.float64) * vol), 0.0)
        # spread cube values onto the window cells, one axis at a time
        R = V
        for ax in range(n):
            x = win_lo[:, ax][:, None] + np.arange(win_shape[ax])[None, :]
            K = R.shape[ax + 1]
            if st == s:
                j = x // s - ks[ax][:, None]
                hit = (j >= 0) & (j < K)
                src = np.clip(j, 0, K - 1)
            else:
                # cubes containing x have anchors x - s + 1 .. x
                j = x - ks[ax][:, None]
                hit = (j >= 0) & (j - s + 1 <= K - 1)
                pad = [(0, 0)] * R.ndim
                pad[ax + 1] = (s - 1, s - 1)
                R = maximum_filter1d(np.pad(R, pad), s, axis=ax + 1, mode="constant", cval=0.0)
                src = np.clip(j + s // 2, 0, R.shape[ax + 1] - 1)
            shape = [B] + [1] * n
            shape[ax + 1] = win_shape[ax]
            G = np.take_along_axis(R, src.reshape(shape), axis=ax + 1)
            R = np.where(hit.reshape(shape), G, 0.0)
        np.maximum(out, R, out=out)
    return out


def _sparse_max(acc: Accumulator, alpha: float, family: CubeFamily, wlo=None, whi=None) -> np.ndarray:
    """The layered maximum of one function on the block ``[wlo, whi)``."""
    grid = acc.grid
    wlo = np.zeros(grid.n, dtype=int) if wlo is None else np.asarray(wlo, dtype=int)
    whi = np.asarray(grid.resolution) if whi is None else np.asarray(whi, dtype=int)
    shape = tuple(int(k) for k in whi - wlo)
    if np.any(acc.hi <= acc.lo):
        return np.zeros(shape)
    sup_shape = tuple(int(k) for k in acc.hi - acc.lo)
    return _block_max(acc.absolute[None], acc.lo[None], sup_shape, wlo[None], shape, grid, alpha, family)[0]


def fractional_maximal_blocks(values: np.ndarray, anchors, alpha: float, family: CubeFamily,
                              chunk_elems: int = 1 << 22) -> np.ndarray:
    """Fractional maximal functions of many block-supported functions, each on its block.

    ``values[b]`` holds the function b on the cells ``anchors[b] + [0, block)``
    (zero elsewhere on the family's grid); the result has the shape of
    ``values`` and holds ``M_alpha f_b`` on the same cells.
    """
    grid = family.grid
    n = grid.n
    _check_alpha(alpha, n)
    values = np.asarray(values, dtype=float)
    anchors = np.asarray(anchors, dtype=int).reshape(-1, n)
    block = values.shape[1:]
    if values.ndim != n + 1 or anchors.shape[0] != values.shape[0]:
        raise ArgumentError("values must be (B, *block) with one anchor per function")
    if np.any(anchors < 0) or np.any(anchors + np.asarray(block) > np.asarray(grid.resolution)):
        raise ArgumentError("blocks must lie inside the grid")
    tables = np.abs(values).astype(np.longdouble)
    for ax in range(1, n + 1):
        tables = np.cumsum(tables, axis=ax)
    tables = np.pad(tables, [(0, 0)] + [(1, 0)] * n)
    span = max(l.side for l in family.layers)
    per = max(1, chunk_elems // math.prod(b + 2 * span for b in block))
    out = np.empty(values.shape)
    for start in range(0, values.shape[0], per):
        sl = slice(start, start + per)
        out[sl] = _block_max(tables[sl], anchors[sl], block, anchors[sl], block, grid, alpha, family)
    return out


def fractional_maximal_on(f: GridFunction, alpha: float, family: CubeFamily, window: Cube) -> np.ndarray:
    """``fractional_maximal(f, alpha, family)`` evaluated only on the cells of ``window``."""
    grid = f.grid
    _check_alpha(alpha, grid.n)
    if family.grid != grid:
        raise ArgumentError("family built on a different grid")
    if not window.inside(grid):
        raise ArgumentError("window must lie inside the grid")
    return _sparse_max(Accumulator(f), alpha, family, window.anchor, window.hi())


def hl_maximal(f: GridFunction, family: CubeFamily, centered: bool = False, witness: bool = False,
               anchor_box: Cube | None = None) -> OperatorOutput:
    """Hardy-Littlewood maximal function (fractional maximal with alpha = 0)."""
    return fractional_maximal(f, 0.0, family, centered, witness, anchor_box)


def _centered(acc: Accumulator, alpha: float, radii) -> np.ndarray:
    grid = acc.grid
    idx = np.stack(np.meshgrid(*[np.arange(N) for N in grid.resolution], indexing="ij"), -1).reshape(-1, grid.n)
    best = np.full(grid.size, -np.inf)
    for r in radii:
        S = acc.box_sums(idx - r, idx + r + 1).astype(np.float64)
        w = cube_weight((2 * r + 1) ** grid.n, grid, alpha)
        best = np.maximum(best, w * (S * grid.cell_volume))
    return best.reshape(grid.shape)


def restricted_maximal(f: GridFunction, family: CubeFamily, Q0: Cube, alpha: float = 0.0) -> np.ndarray:
    """``M_{alpha,Q0} f`` on the cells of Q0 using family cubes inside Q0 plus all single cells."""
    grid = f.grid
    layers = tuple(family.layers)
    if not any(l.side == 1 for l in layers):
        layers = (Layer(1, 1),) + layers
    acc = Accumulator(f)
    vol = grid.cell_volume

    def values(layer):
        axes, S = _layer_sums(acc, layer)
        return axes, cube_weight(layer.side ** grid.n, grid, alpha) * (S * vol)

    out, _ = _layered_max(grid, family, values, anchor_box=Q0, layers=[l for l in layers if l.side <= Q0.side])
    return out[Q0.slices()]


def sharp_maximal(f: GridFunction, family: CubeFamily, witness: bool = False) -> OperatorOutput:
    """``sup_{Q ni x} (1/|Q|) int_Q |f - f_Q|``.

    Cube means come from the prefix sums; the oscillation of each cube is a
    direct sum of ``|c f_y - S|`` (c = cells, S = cube sum) divided by ``c**2``.
    """
    grid = f.grid
    t0 = time.perf_counter()
    acc = Accumulator(f)
    v = f.values
    n = grid.n

    def values(layer):
        axes, S = _layer_sums(acc, layer, absolute=False)
        c = float(layer.side ** n)
        osc = np.zeros(S.shape)
        A = [a for a in axes]
        for d in itertools.product(range(layer.side), repeat=n):
            y = v[np.ix_(*[a + dd for a, dd in zip(A, d)])] if n > 1 else v[A[0] + d[0]]
            osc += np.abs(c * y - S)
        return axes, osc / (c * c)

    out, wit = _layered_max(grid, family, values, witness)
    return OperatorOutput(f.with_values(np.maximum(out, 0.0)), wit, {"total": time.perf_counter() - t0})


def _cell_index(grid: Grid) -> np.ndarray:
    return np.stack(np.meshgrid(*[np.arange(N) for N in grid.resolution], indexing="ij"), -1).reshape(-1, grid.n)


def maximal_commutator(b: GridFunction, f: GridFunction, alpha: float, family: CubeFamily,
                       chunk_elems: int = 1 << 22) -> OperatorOutput:
    """``sup_{Q ni x} |Q|**(alpha/n - 1) int_Q |b(x) - b(y)| |f(y)| dy``.

    For a block of points x the kernel ``G_x(z) = |b(x) - b(x+z)| |f(x+z)|`` is
    tabulated over all offsets z reachable by family cubes, and its prefix sums
    in z give every cube sum containing x in O(1).
    """
    grid = _same_grid(b, f)
    _check_alpha(alpha, grid.n)
    t0 = time.perf_counter()
    n = grid.n
    res = np.asarray(grid.resolution)
    S = max(l.side for l in family.layers)
    span = 2 * S - 1
    bv, fv = b.values, np.abs(f.values)
    X = _cell_index(grid)
    best = np.full(X.shape[0], -np.inf)
    vol = grid.cell_volume
    Z = np.stack(np.meshgrid(*[np.arange(-(S - 1), S)] * n, indexing="ij"), -1).reshape(-1, n)
    per = max(1, chunk_elems // (span ** n))
    weights = {l.side: cube_weight(l.side ** n, grid, alpha) for l in family.layers}
    for start in range(0, X.shape[0], per):
        Xc = X[start:start + per]
        C = Xc.shape[0]
        Y = Xc[:, None, :] + Z[None, :, :]
        inside = np.all((Y >= 0) & (Y < res), axis=2)
        Yc = np.where(inside[..., None], Y, 0)
        by = bv[tuple(Yc.reshape(-1, n).T)].reshape(C, -1)
        fy = fv[tuple(Yc.reshape(-1, n).T)].reshape(C, -1)
        bx = bv[tuple(Xc.T)][:, None]
        G = np.where(inside, np.abs(bx - by) * fy, 0.0).reshape((C,) + (span,) * n)
        P = np.zeros((C,) + (span + 1,) * n, dtype=np.longdouble)
        cs = G.astype(np.longdouble)
        for ax in range(1, n + 1):
            cs = np.cumsum(cs, axis=ax)
        P[(slice(None),) + (slice(1, None),) * n] = cs
        rows = np.arange(C)
        bc = best[start:start + C]
        for layer in family.layers:
            s = layer.side
            if layer.stride == 1:
                offsets = itertools.product(range(s), repeat=n)
            else:
                offsets = [None]
            for d in offsets:
                dd = Xc % s if d is None else np.broadcast_to(np.asarray(d), Xc.shape)
                a = Xc - dd
                ok = np.all((a >= 0) & (a + s <= res), axis=1)
                lo = (S - 1) - dd
                hi = lo + s
                if n == 1:
                    tot = P[rows, hi[:, 0]] - P[rows, lo[:, 0]]
                else:
                    tot = (P[rows, hi[:, 0], hi[:, 1]] - P[rows, lo[:, 0], hi[:, 1]]
                           - P[rows, hi[:, 0], lo[:, 1]] + P[rows, lo[:, 0], lo[:, 1]])
                val = weights[s] * (tot.astype(np.float64) * vol)
                bc = np.where(ok & (val > bc), val, bc)
        best[start:start + C] = bc
    out = np.where(np.isneginf(best), 0.0, best).reshape(grid.shape)
    return OperatorOutput(f.with_values(out), None, {"total": time.perf_counter() - t0})


def fm_commutator(b: GridFunction, f: GridFunction, alpha: float, family: CubeFamily) -> OperatorOutput:
    """``[M_alpha, b] f = M_alpha(b f) - b M_alpha f`` with one family for both terms."""
    grid = _same_grid(b, f)
    t0 = time.perf_counter()
    m_bf = fractional_maximal(b * f, alpha, family).values
    m_f = fractional_maximal(f, alpha, family).values
    out = m_bf - b.values * m_f
    return OperatorOutput(GridFunction(grid, out), None, {"total": time.perf_counter() - t0})


# --------------------------------------------------------------------------
# Riesz potentials


def self_cell_weight(alpha: float, cell_size) -> float:
    """``int_cell |z|**(alpha - n) dz`` over a cell centred at the origin (exact)."""
    h = np.atleast_1d(np.asarray(cell_size, dtype=float))
    n = h.size
    if n == 1:
        return 2.0 * (h[0] / 2.0) ** alpha / alpha
    a, c = h[0] / 2.0, h[1] / 2.0
    th = math.atan2(c, a)
    i1, _ = spi.quad(lambda t: (a / math.cos(t)) ** alpha, 0.0, th, epsabs=0, epsrel=1e-13, limit=200)
    i2, _ = spi.quad(lambda t: (c / math.sin(t)) ** alpha, th, math.pi / 2, epsabs=0, epsrel=1e-13, limit=200)
    return 4.0 * (i1 + i2) / alpha


def riesz_kernel(grid: Grid, alpha: float) -> np.ndarray:
    """Cell weights ``|z|**(alpha - n) |cell|`` on offsets ``[-(N-1), N-1]**n``."""
    h = grid.cell_size
    axes = [np.arange(-(N - 1), N) * hh for N, hh in zip(grid.resolution, h)]
    mesh = np.meshgrid(*axes, indexing="ij")
    r = np.sqrt(sum(m * m for m in mesh))
    with np.errstate(divide="ignore"):
        K = r ** (alpha - grid.n) * grid.cell_volume
    K[tuple(N - 1 for N in grid.resolution)] = self_cell_weight(alpha, h)
    return K


def _pair_check(grid: Grid, override: bool):
    pairs = grid.size ** 2
    if pairs > PAIR_CAP and not override:
        raise CapExceeded(f"{pairs} point pairs exceed the cap of {PAIR_CAP}; pass override=True")


def riesz_potential(f: GridFunction, alpha: float, override: bool = False) -> OperatorOutput:
    """``I_alpha f(x) = int f(y) |x - y|**(alpha - n) dy`` by direct summation."""
    grid = f.grid
    _check_alpha(alpha, grid.n, open_left=True)
    _pair_check(grid, override)
    t0 = time.perf_counter()
    K = riesz_kernel(grid, alpha)
    full = convolve(f.values, K, mode="full", method="direct")
    sl = tuple(slice(N - 1, 2 * N - 1) for N in grid.resolution)
    return OperatorOutput(f.with_values(full[sl]), None, {"total": time.perf_counter() - t0})


def _pairwise(b: GridFunction, f: GridFunction, alpha: float, kernel, override: bool,
              chunk_elems: int = 1 << 22) -> np.ndarray:
    grid = _same_grid(b, f)
    _check_alpha(alpha, grid.n, open_left=True)
    _pair_check(grid, override)
    K = riesz_kernel(grid, alpha)
    centre = np.asarray(grid.resolution) - 1
    X = _cell_index(grid)
    bv, fv = b.flat, f.flat
    out = np.empty(grid.size)
    per = max(1, chunk_elems // grid.size)
    for start in range(0, grid.size, per):
        Xc = X[start:start + per]
        D = Xc[:, None, :] - X[None, :, :] + centre
        Kc = K[tuple(np.moveaxis(D, -1, 0))]
        w = kernel(bv[start:start + per, None], bv[None, :])
        out[start:start + per] = np.sum(Kc * w * fv[None, :], axis=1)
    return out.reshape(grid.shape)


def riesz_commutator(b: GridFunction, f: GridFunction, alpha: float, override: bool = False) -> OperatorOutput:
    """``[I_alpha, b] f(x) = int (b(y) - b(x)) f(y) |x - y|**(alpha - n) dy``."""
    t0 = time.perf_counter()
    out = _pairwise(b, f, alpha, lambda bx, by: by - bx, override)
    return OperatorOutput(f.with_values(out), None, {"total": time.perf_counter() - t0})


def riesz_abs_commutator(b: GridFunction, f: GridFunction, alpha: float, override: bool = False) -> OperatorOutput:
    """``I_{b,alpha} f(x) = int |b(x) - b(y)| f(y) |x - y|**(alpha - n) dy``."""
    t0 = time.perf_counter()
    out = _pairwise(b, f, alpha, lambda bx, by: np.abs(bx - by), override)
    return OperatorOutput(f.with_values(out), None, {"total": time.perf_counter() - t0})


OPERATORS = {
    "M": "hl_maximal",
    "Mc": "hl_maximal(centered)",
    "Malpha": "fractional_maximal",
    "sharp": "sharp_maximal",
    "Mb": "maximal_commutator",
    "commutator": "fm_commutator",
    "I": "riesz_potential",
    "Ib_commutator": "riesz_commutator",
    "Ib": "riesz_abs_commutator",
}
