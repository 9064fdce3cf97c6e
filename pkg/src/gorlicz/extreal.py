"""Extended non-negative reals as float64 arrays.

Values live in ``[0, inf]``.  Anything at or above the saturation cap is
promoted to ``inf`` so that tabulated quantities never carry huge-but-finite
garbage.  ``0 * inf`` is ``0`` by convention (the measure-theoretic one).
"""

from __future__ import annotations

import numpy as np

DEFAULT_CAP = 1e300


def saturate(a, cap: float = DEFAULT_CAP) -> np.ndarray:
    """Promote values ``>= cap`` to ``inf``; NaN (from inf - inf etc.) is an error."""
    a = np.asarray(a, dtype=float)
    if np.isnan(a).any():
        raise FloatingPointError("NaN produced in extended-real arithmetic")
    return np.where(a >= cap, np.inf, a)


def ext_mul(a, b) -> np.ndarray:
    """Product with the convention ``0 * inf = 0``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a * b
    return np.where((a == 0) | (b == 0), 0.0, out)


def ext_add(a, b) -> np.ndarray:
    return np.asarray(a, dtype=float) + np.asarray(b, dtype=float)


def is_infinite(a, cap: float = DEFAULT_CAP) -> np.ndarray:
    return np.asarray(a, dtype=float) >= cap
