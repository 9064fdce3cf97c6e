"""Deterministic banks of test functions, Phi-functions and identity cases."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..grid import Grid, GridFunction, make_grid
from ..phi import (ArgumentError, Coefficient, OrliczLog, PhiSpec, double_phase, phi_from_dict, power,
                   variable_exponent)

BANKS = ("f", "b", "phi", "identities", "random")


@dataclass(frozen=True)
class Case:
    """One bank entry.  ``params`` is plain JSON so cases serialise as-is."""

    bank: str
    name: str
    kind: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"bank": self.bank, "name": self.name, "kind": self.kind, "params": self.params}

    # ------------------------------------------------------------------
    def function(self, grid: Grid | None = None) -> GridFunction:
        """Sample the case on ``grid`` (random cases carry their own grid)."""
        if self.kind == "random":
            return _random_functions(self.params)[0]
        if grid is None:
            raise ArgumentError(f"case {self.name!r} needs a grid")
        return grid.sample(lambda x: _closed_form(self.params, x))

    def coefficient(self) -> GridFunction:
        """The multiplier b of a random case."""
        if self.kind != "random":
            raise ArgumentError("only random cases carry a multiplier")
        return _random_functions(self.params)[1]

    def grid(self) -> Grid:
        if self.kind == "random":
            return make_grid(self.params["box"], self.params["resolution"])
        if self.kind == "chi":
            N, n = self.params["N"], self.params["n"]
            return make_grid([(0.0, 1.0)] * n, (N,) * n)
        raise ArgumentError(f"case {self.name!r} has no grid of its own")

    def phi(self) -> PhiSpec:
        if self.kind != "phi":
            raise ArgumentError(f"case {self.name!r} is not a Phi-function")
        return phi_from_dict(self.params["spec"])


def _radius(x: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(x * x, axis=1))


def _closed_form(P: dict, x: np.ndarray) -> np.ndarray:
    shape = P["shape"]
    r = _radius(x)
    scale = float(P.get("scale", 1.0))
    if shape == "gaussian":
        v = np.exp(-r * r)
    elif shape == "cube":
        v = np.all((x >= 0.0) & (x < 1.0), axis=1).astype(float)
    elif shape == "cusp":
        with np.errstate(divide="ignore"):
            v = np.where((r < 1.0) & (r > 0), r ** -float(P["gamma"]), 0.0)
    elif shape == "oscillatory":
        v = np.sin(3.0 * x[:, 0]) * np.exp(-r * r / 4.0)
    elif shape == "log":
        with np.errstate(divide="ignore"):
            v = np.abs(np.log(r))
    elif shape == "step":
        v = np.tanh(x[:, 0] / float(P.get("width", 0.25)))
    else:
        raise ArgumentError(f"unknown closed form {shape!r}")
    return scale * v


# --------------------------------------------------------------------------
# banks


def _f_bank(n: int) -> list[Case]:
    return [
        Case("f", "gaussian", "f", {"shape": "gaussian"}),
        Case("f", "cube", "f", {"shape": "cube"}),
        Case("f", "cusp", "f", {"shape": "cusp", "gamma": 0.25 * n}),
        Case("f", "oscillatory", "f", {"shape": "oscillatory"}),
    ]


def _b_bank(n: int) -> list[Case]:
    return [
        Case("b", "log_abs", "b", {"shape": "log", "nonnegative": True, "bounded_below": True}),
        Case("b", "log_abs_x3", "b", {"shape": "log", "scale": 3.0, "nonnegative": True, "bounded_below": True}),
        Case("b", "step", "b", {"shape": "step", "width": 0.25, "nonnegative": False, "bounded_below": True}),
        Case("b", "neg_log_abs", "b", {"shape": "log", "scale": -1.0, "nonnegative": False,
                                       "bounded_below": False}),
        Case("b", "neg_step", "b", {"shape": "step", "width": 0.25, "scale": -1.0, "nonnegative": False,
                                    "bounded_below": True}),
    ]


def _phi_bank(n: int) -> list[Case]:
    bump = Coefficient("bump", {"amplitude": 1.0, "width": 1.0})
    decay = Coefficient("decay", {"limit": 2.0, "amplitude": 0.5})
    specs = [
        ("power_p2", power(2.0), {"r": 0.5}),
        ("power_p3", power(3.0), {"r": 1.0 / 3.0}),
        ("double_phase", double_phase(2.0, 3.0, bump), {"r": 1.0 / 3.0}),
        ("variable_exponent", variable_exponent(decay), {"r": 0.4}),
        ("orlicz_log", OrliczLog(2.0), {"r": 1.0 / 3.0}),
    ]
    return [Case("phi", name, "phi", {"spec": spec.to_dict(), **extra}) for name, spec, extra in specs]


IDENTITY_GRIDS = ((1, 4096), (2, 256))


def _identity_bank(grids=IDENTITY_GRIDS) -> list[Case]:
    out = []
    for n, N in grids:
        top = int(np.log2(N))
        for level in range(top + 1):
            out.append(Case("identities", f"chi_dyadic_{n}d_{N}_level{level}", "chi",
                            {"n": n, "N": N, "level": level, "side": N >> level}))
    return out


def _random_bank(seed: int, count: int) -> list[Case]:
    """Small grids with dyadic-rational values (multiples of 1/8).

    Such values keep every prefix sum exact, so fast and naive evaluations can
    be compared for exact equality.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = 1 if i % 3 else 2
        if n == 1:
            N = int(rng.choice([8, 12, 16, 24, 32, 48, 64]))
            res = [N]
        else:
            N = int(rng.choice([4, 6, 8, 12, 16]))
            res = [N, N]
        lo = float(rng.integers(-4, 1))
        width = float(rng.choice([1.0, 2.0, 4.0, 8.0]))
        out.append(Case("random", f"random_{i:03d}", "random", {
            "box": [[lo, lo + width]] * n,
            "resolution": res,
            "alpha": float(rng.choice([0.0, 0.25, 0.5, 0.75])) * n,
            "density": float(rng.choice([0.3, 0.7, 1.0])),
            "seed": [int(seed), i],
        }))
    return out


def _random_functions(P: dict) -> tuple[GridFunction, GridFunction]:
    grid = make_grid(P["box"], P["resolution"])
    rng = np.random.default_rng(P["seed"])
    f = rng.integers(-32, 33, size=grid.shape) / 8.0
    f = np.where(rng.random(grid.shape) < P["density"], f, 0.0)
    b = rng.integers(-32, 33, size=grid.shape) / 8.0
    return GridFunction(grid, f), GridFunction(grid, b)


def builtin_testbank(name: str, n: int = 1, seed: int = 0, count: int = 60) -> list[Case]:
    """Return the named bank: ``f``, ``b``, ``phi``, ``identities`` or ``random``.

    Banks are pure functions of their arguments, so regeneration with the same
    seed gives identical cases.
    """
    if not name:
        raise ArgumentError("bank name must be non-empty")
    if name == "f":
        return _f_bank(n)
    if name == "b":
        return _b_bank(n)
    if name == "phi":
        return _phi_bank(n)
    if name == "identities":
        return _identity_bank()
    if name == "random":
        if count < 1:
            raise ArgumentError("random bank needs count >= 1")
        return _random_bank(seed, count)
    raise ArgumentError(f"unknown test bank {name!r}; known: {', '.join(BANKS)}")
