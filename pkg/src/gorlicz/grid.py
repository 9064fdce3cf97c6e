"""Uniform grids over boxes in R^n (n = 1, 2), sampled functions, cube
families and prefix-sum accumulators.

Cubes are measured in cells: a cube is an anchor cell index plus a side
length, covering ``[anchor, anchor + side)`` along every axis.  Functions are
zero outside the grid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np


class GridError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Grid:
    box: tuple
    resolution: tuple

    def __post_init__(self):
        box = np.asarray(self.box, dtype=float)
        if box.ndim == 1:
            box = box.reshape(1, 2)
        if box.ndim != 2 or box.shape[1] != 2 or box.shape[0] not in (1, 2):
            raise GridError("box must be one or two (lo, hi) pairs")
        if np.any(~(box[:, 1] > box[:, 0])) or not np.all(np.isfinite(box)):
            raise GridError(f"degenerate box {self.box!r}")
        res = self.resolution
        res = (int(res),) * box.shape[0] if np.ndim(res) == 0 else tuple(int(r) for r in res)
        if len(res) != box.shape[0] or min(res) < 2:
            raise GridError("resolution must be >= 2 cells per axis")
        object.__setattr__(self, "box", tuple((float(a), float(b)) for a, b in box))
        object.__setattr__(self, "resolution", res)

    def __eq__(self, other):
        return isinstance(other, Grid) and self.box == other.box and self.resolution == other.resolution

    def __hash__(self):
        return hash((self.box, self.resolution))

    @property
    def n(self) -> int:
        return len(self.resolution)

    @property
    def shape(self) -> tuple:
        return self.resolution

    @property
    def size(self) -> int:
        return math.prod(self.resolution)

    @property
    def cell_size(self) -> np.ndarray:
        b = np.asarray(self.box)
        return (b[:, 1] - b[:, 0]) / np.asarray(self.resolution)

    @cached_property
    def cell_volume(self) -> float:
        return float(np.prod(self.cell_size))

    @property
    def volume(self) -> float:
        return float(np.prod([b - a for a, b in self.box]))

    def axis_centers(self, axis: int) -> np.ndarray:
        lo, _ = self.box[axis]
        h = self.cell_size[axis]
        return lo + h * (np.arange(self.resolution[axis]) + 0.5)

    def points(self) -> np.ndarray:
        """Cell centres as an ``(size, n)`` array in C order."""
        mesh = np.meshgrid(*[self.axis_centers(a) for a in range(self.n)], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def cell_of(self, x) -> tuple:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.floor((x - np.asarray(self.box)[:, 0]) / self.cell_size).astype(int)
        if np.any(idx < 0) or np.any(idx >= np.asarray(self.resolution)):
            raise GridError("point outside the grid")
        return tuple(int(i) for i in idx)

    def sample(self, fn) -> "GridFunction":
        """Evaluate ``fn(points)`` (points of shape ``(size, n)``) at the cell centres."""
        return GridFunction(self, np.asarray(fn(self.points()), dtype=float).reshape(self.shape))

    def refine(self, factor: int = 2) -> "Grid":
        return Grid(self.box, tuple(r * factor for r in self.resolution))

    def to_dict(self) -> dict:
        return {"box": [list(b) for b in self.box], "resolution": list(self.resolution)}


def make_grid(box, resolution) -> Grid:
    return Grid(box, resolution)


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray
    extended: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size != self.grid.size:
            raise GridError(f"expected {self.grid.size} values, got {v.size}")
        v = v.reshape(self.grid.shape)
        if not self.extended and not np.all(np.isfinite(v)):
            raise GridError("non-finite values in a grid function not flagged as extended")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def with_values(self, values, extended: bool | None = None) -> "GridFunction":
        return GridFunction(self.grid, values, self.extended if extended is None else extended)

    def __abs__(self):
        return self.with_values(np.abs(self.values))

    def __mul__(self, other):
        o = other.values if isinstance(other, GridFunction) else other
        return self.with_values(self.values * o)

    __rmul__ = __mul__

    def __add__(self, other):
        o = other.values if isinstance(other, GridFunction) else other
        return self.with_values(self.values + o)

    def __sub__(self, other):
        o = other.values if isinstance(other, GridFunction) else other
        return self.with_values(self.values - o)

    def __neg__(self):
        return self.with_values(-self.values)


# --------------------------------------------------------------------------
# cubes


@dataclass(frozen=True)
class Cube:
    anchor: tuple
    side: int

    def slices(self) -> tuple:
        return tuple(slice(a, a + self.side) for a in self.anchor)

    def hi(self) -> tuple:
        return tuple(a + self.side for a in self.anchor)

    def count(self, n: int | None = None) -> int:
        return self.side ** len(self.anchor)

    def volume(self, grid: Grid) -> float:
        return self.count() * grid.cell_volume

    def inside(self, grid: Grid) -> bool:
        return all(0 <= a and a + self.side <= r for a, r in zip(self.anchor, grid.resolution))

    def contains_cell(self, idx) -> bool:
        return all(a <= i < a + self.side for a, i in zip(self.anchor, idx))

    def centre(self, grid: Grid) -> np.ndarray:
        lo = np.asarray(grid.box)[:, 0]
        return lo + grid.cell_size * (np.asarray(self.anchor) + self.side / 2)

    def to_dict(self):
        return {"anchor": list(self.anchor), "side": self.side}


@dataclass(frozen=True)
class Layer:
    """All cubes of one side; ``stride == side`` is a partition, ``stride == 1`` slides."""

    side: int
    stride: int

    def anchors_1d(self, N: int) -> np.ndarray:
        if self.side > N:
            return np.zeros(0, dtype=int)
        return np.arange(0, N - self.side + 1, self.stride)

    def count(self, grid: Grid) -> int:
        return math.prod(len(self.anchors_1d(N)) for N in grid.resolution)


@dataclass(frozen=True, eq=False)
class CubeFamily:
    grid: Grid
    kind: str
    layers: tuple
    centered_radii: tuple
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        layers = tuple(sorted(set(self.layers), key=lambda l: (l.side, l.stride)))
        # a sliding layer already contains the partition layer of the same side
        slide = {l.side for l in layers if l.stride == 1}
        layers = tuple(l for l in layers if l.stride == 1 or l.side not in slide)
        layers = tuple(l for l in layers if l.count(self.grid) > 0)
        if not layers:
            raise GridError("empty cube family")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "centered_radii", tuple(sorted(set(int(r) for r in self.centered_radii))))

    def __len__(self) -> int:
        return sum(l.count(self.grid) for l in self.layers)

    def cubes(self):
        """Enumerate cubes layer by layer, anchors in C order."""
        for l in self.layers:
            axes = [l.anchors_1d(N) for N in self.grid.resolution]
            for anchor in np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, self.grid.n):
                yield Cube(tuple(int(a) for a in anchor), l.side)

    @property
    def sides(self) -> tuple:
        return tuple(sorted({l.side for l in self.layers}))

    def restricted(self, cube: Cube) -> list:
        """Family cubes inside ``cube`` (the singleton cells always included)."""
        out = []
        singles = any(l.side == 1 for l in self.layers)
        for l in self.layers:
            if l.side > cube.side:
                continue
            axes = []
            for a in cube.anchor:
                first = -(-a // l.stride) * l.stride
                axes.append(np.arange(first, a + cube.side - l.side + 1, l.stride))
            for anchor in np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, self.grid.n):
                out.append(Cube(tuple(int(v) for v in anchor), l.side))
        if not singles:
            axes = [np.arange(a, a + cube.side) for a in cube.anchor]
            for anchor in np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, self.grid.n):
                out.append(Cube(tuple(int(v) for v in anchor), 1))
        return out

    def union(self, other: "CubeFamily") -> "CubeFamily":
        if other.grid != self.grid:
            raise GridError("families live on different grids")
        return CubeFamily(self.grid, "union", self.layers + other.layers,
                          self.centered_radii + other.centered_radii,
                          {"members": [self.describe(), other.describe()]})

    def describe(self) -> dict:
        return {"kind": self.kind, **self.params}


def dyadic_family(grid: Grid, levels: int | None = None) -> CubeFamily:
    """Dyadic cubes of side ``N / 2**k`` for k = 0..levels (clamped to the grid)."""
    N = min(grid.resolution)
    if len(set(grid.resolution)) != 1 or N & (N - 1):
        raise GridError("dyadic families need a square power-of-two resolution")
    top = int(math.log2(N))
    levels = top if levels is None else max(0, min(int(levels), top))
    sides = [N >> k for k in range(levels + 1)]
    layers = tuple(Layer(s, s) for s in sides)
    return CubeFamily(grid, "dyadic", layers, (0,) + tuple(s - 1 for s in sides), {"levels": levels})


def sliding_family(grid: Grid, radii) -> CubeFamily:
    """Cubes of side ``2r + 1`` at every anchor, for each radius r."""
    radii = tuple(sorted({int(r) for r in radii}))
    if not radii or radii[0] < 0:
        raise GridError("sliding family needs non-negative radii")
    layers = tuple(Layer(2 * r + 1, 1) for r in radii)
    return CubeFamily(grid, "sliding", layers, radii, {"radii": list(radii)})


def all_family(grid: Grid, max_side: int | None = None) -> CubeFamily:
    """Every cube in the grid with side <= ``max_side``."""
    N = min(grid.resolution)
    max_side = N if max_side is None else min(int(max_side), N)
    layers = tuple(Layer(s, 1) for s in range(1, max_side + 1))
    return CubeFamily(grid, "all", layers, tuple(range(0, max_side)), {"max_side": max_side})


def cube_family(grid: Grid, kind: str, **kw) -> CubeFamily:
    """Build a family by name: ``dyadic``, ``sliding``, ``all`` or ``standard``.

    ``standard`` is dyadic (when possible) united with sliding radii 1, 2, 4, ...
    """
    if kind == "dyadic":
        return dyadic_family(grid, kw.get("levels"))
    if kind == "sliding":
        return sliding_family(grid, kw.get("radii", (1,)))
    if kind == "all":
        return all_family(grid, kw.get("max_side"))
    if kind == "standard":
        N = min(grid.resolution)
        radii = kw.get("radii") or [0] + [2 ** k for k in range(int(math.log2(max(N // 4, 1))) + 1)]
        fam = sliding_family(grid, [r for r in radii if 2 * r + 1 <= N])
        try:
            return dyadic_family(grid).union(fam)
        except GridError:
            return fam
    raise GridError(f"unknown family kind {kind!r}")


# --------------------------------------------------------------------------
# prefix sums


class Accumulator:
    """Summed-area tables of f and |f| (extended precision) over f's support box.

    Cube sums outside the support bounding box are zero, which makes sparse
    inputs (indicators, bumps) cheap on large grids.
    """

    def __init__(self, f: GridFunction):
        self.grid = f.grid
        v = f.values
        n = self.grid.n
        mask = v != 0
        lo, hi = [], []
        for ax in range(n):
            used = np.flatnonzero(mask.any(axis=tuple(k for k in range(n) if k != ax)) if n > 1 else mask)
            lo.append(used[0] if used.size else 0)
            hi.append(used[-1] + 1 if used.size else 0)
        self.lo = np.array(lo, dtype=int)
        self.hi = np.array(hi, dtype=int)
        if np.any(self.hi <= self.lo):
            self.lo[:] = 0
            self.hi[:] = 0
        sub = v[tuple(slice(a, b) for a, b in zip(self.lo, self.hi))].astype(np.longdouble)
        self.signed = self._table(sub)
        self.absolute = self._table(np.abs(sub))

    @staticmethod
    def _table(a: np.ndarray) -> np.ndarray:
        out = np.zeros(tuple(s + 1 for s in a.shape), dtype=np.longdouble)
        c = a
        for ax in range(a.ndim):
            c = np.cumsum(c, axis=ax)
        out[tuple(slice(1, None) for _ in range(a.ndim))] = c
        return out

    def box_sums(self, lo: np.ndarray, hi: np.ndarray, absolute: bool = True) -> np.ndarray:
        """Sums over the cell boxes ``[lo, hi)`` (arrays of shape ``(K, n)``), clipped to the grid."""
        T = self.absolute if absolute else self.signed
        lo = np.clip(np.asarray(lo) - self.lo, 0, self.hi - self.lo)
        hi = np.clip(np.asarray(hi) - self.lo, 0, self.hi - self.lo)
        hi = np.maximum(hi, lo)
        if self.grid.n == 1:
            return T[hi[:, 0]] - T[lo[:, 0]]
        a0, a1, b0, b1 = lo[:, 0], lo[:, 1], hi[:, 0], hi[:, 1]
        return T[b0, b1] - T[a0, b1] - T[b0, a1] + T[a0, a1]

    def cube_sum(self, Q: Cube, absolute: bool = False) -> float:
        return float(self.box_sums(np.array([Q.anchor]), np.array([Q.hi()]), absolute)[0])


def accumulate(f: GridFunction) -> Accumulator:
    return Accumulator(f)


def cube_average(acc: Accumulator, Q: Cube, absolute: bool = False) -> float:
    """Average of f (or |f| with ``absolute``) over the cube Q."""
    if not Q.inside(acc.grid):
        raise GridError("cube not inside the grid")
    return acc.cube_sum(Q, absolute) / Q.count()


def integrate(f: GridFunction, region: Cube | None = None) -> float:
    """Midpoint-rule integral over the whole grid or over a cube."""
    v = f.values if region is None else f.values[region.slices()]
    if region is not None and not region.inside(f.grid):
        raise GridError("cube not inside the grid")
    return math.fsum(v.ravel().tolist()) * f.grid.cell_volume


# --------------------------------------------------------------------------
# I/O


def _header(f: GridFunction) -> dict:
    return {**f.grid.to_dict(), "extended": f.extended}


def _from_header(h: dict) -> tuple[Grid, bool]:
    return Grid(tuple(map(tuple, h["box"])), tuple(h["resolution"])), bool(h.get("extended", False))


def save_csv(f: GridFunction, path) -> None:
    with open(path, "w") as fh:
        fh.write("# " + json.dumps(_header(f)) + "\n")
        fh.write("index,value\n")
        for i, v in enumerate(f.flat):
            fh.write(f"{i},{float(v)!r}\n")


def load_csv(path) -> GridFunction:
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise GridError("missing JSON header line")
        grid, ext = _from_header(json.loads(first[1:]))
        rows = [line.split(",") for line in fh if line.strip() and not line.startswith("index")]
    vals = np.empty(grid.size)
    for i, v in rows:
        vals[int(i)] = float(v)
    return GridFunction(grid, vals, ext)


def save_bin(f: GridFunction, path) -> None:
    """JSON header line followed by little-endian float64 values in C order."""
    with open(path, "wb") as fh:
        fh.write(json.dumps(_header(f)).encode() + b"\n")
        fh.write(np.ascontiguousarray(f.flat, dtype="<f8").tobytes())


def load_bin(path) -> GridFunction:
    with open(path, "rb") as fh:
        grid, ext = _from_header(json.loads(fh.readline()))
        vals = np.frombuffer(fh.read(), dtype="<f8")
    return GridFunction(grid, vals.copy(), ext)


def load_function(path) -> GridFunction:
    return load_csv(path) if Path(path).suffix.lower() == ".csv" else load_bin(path)


def save_function(f: GridFunction, path) -> None:
    (save_csv if Path(path).suffix.lower() == ".csv" else save_bin)(f, path)
