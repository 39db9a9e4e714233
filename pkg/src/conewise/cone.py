"""Order and projective-metric primitives on the standard orthant R^n_+.

Ratios are returned as plain floats; ``math.inf`` is the explicit value of an
empty infimum, never a large sentinel.  Support tests are exact zero tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np
from numpy.typing import ArrayLike


@dataclass(frozen=True, eq=False)
class ConeVector:
    """A point of the nonnegative orthant with its cached support mask."""

    coords: np.ndarray
    support: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(-1)
        if not np.all(np.isfinite(c)):
            raise ValueError("cone vector has non-finite coordinates")
        if np.any(c < 0):
            raise ValueError("cone vector has negative coordinates")
        c.setflags(write=False)
        s = c > 0
        s.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "support", s)

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    def __len__(self):
        return self.coords.size

    @property
    def is_interior(self) -> bool:
        return bool(self.support.all())

    @property
    def is_zero(self) -> bool:
        return not self.support.any()

    def tolist(self) -> list[float]:
        return self.coords.tolist()


VectorLike = Union[ConeVector, ArrayLike]


def as_array(x: VectorLike) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape(-1)


def as_cone_array(x: VectorLike, name: str = "x") -> np.ndarray:
    a = as_array(x)
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise ValueError(f"{name} is not a point of the nonnegative orthant")
    return a


def _nonzero(a: np.ndarray, name: str) -> None:
    if not np.any(a != 0):
        raise ValueError(f"{name} must be nonzero")


def upper_ratio(x: VectorLike, y: VectorLike) -> float:
    """M(y/x) = inf{b : y <= b x}, with inf(empty) = +inf.

    ``x`` must be a nonzero cone point; ``y`` may be any real vector.
    """
    xa = as_cone_array(x)
    ya = as_array(y)
    _nonzero(xa, "x")
    off = xa == 0
    if np.any(ya[off] > 0):
        return math.inf
    on = ~off
    return float(np.max(ya[on] / xa[on]))


def lower_ratio(x: VectorLike, y: VectorLike) -> float:
    """m(y/x) = sup{a : a x <= y}; equals -M(-y/x)."""
    xa = as_cone_array(x)
    ya = as_array(y)
    _nonzero(xa, "x")
    off = xa == 0
    if np.any(ya[off] < 0):
        return -math.inf
    on = ~off
    return float(np.min(ya[on] / xa[on]))


def comparable(x: VectorLike, y: VectorLike) -> bool:
    """On the orthant, x ~ y iff the supports coincide."""
    return bool(np.array_equal(as_array(x) > 0, as_array(y) > 0))


def _log_ratio_extremes(xa: np.ndarray, ya: np.ndarray) -> tuple[float, float] | None:
    sx = xa > 0
    if not np.array_equal(sx, ya > 0):
        return None
    z = np.log(ya[sx]) - np.log(xa[sx])
    return float(z.max()), float(z.min())


def hilbert_dist(x: VectorLike, y: VectorLike) -> float:
    """Hilbert's projective metric; +inf for incomparable pairs, 0 at (0, 0)."""
    xa = as_cone_array(x, "x")
    ya = as_cone_array(y, "y")
    zx, zy = not xa.any(), not ya.any()
    if zx and zy:
        return 0.0
    if zx or zy:
        return math.inf
    ext = _log_ratio_extremes(xa, ya)
    if ext is None:
        return math.inf
    hi, lo = ext
    return max(hi - lo, 0.0)


def thompson_dist(x: VectorLike, y: VectorLike) -> float:
    """Thompson's metric max(log M(y/x), -log m(y/x))."""
    xa = as_cone_array(x, "x")
    ya = as_cone_array(y, "y")
    zx, zy = not xa.any(), not ya.any()
    if zx and zy:
        return 0.0
    if zx or zy:
        return math.inf
    ext = _log_ratio_extremes(xa, ya)
    if ext is None:
        return math.inf
    hi, lo = ext
    return max(hi, -lo, 0.0)


def hilbert_dist_interior(x: np.ndarray, y: np.ndarray) -> float:
    # hot-loop variant: caller guarantees x, y > 0 componentwise
    z = np.log(y) - np.log(x)
    return float(z.max() - z.min())


def u_norm(u: VectorLike, x: VectorLike) -> float:
    """inf{a > 0 : -a u <= x <= a u} = max_i |x_i| / u_i for interior u."""
    ua = as_cone_array(u, "u")
    if not np.all(ua > 0):
        raise ValueError("u-norm needs an interior unit u")
    return float(np.max(np.abs(as_array(x)) / ua))


def lattice_join(x: VectorLike, y: VectorLike) -> np.ndarray:
    return np.maximum(as_array(x), as_array(y))


def lattice_parts(x: VectorLike) -> tuple[np.ndarray, np.ndarray]:
    """Canonical decomposition x = x+ - x- with x+, x- in the orthant."""
    a = as_array(x)
    return np.maximum(a, 0.0), np.maximum(-a, 0.0)


@dataclass(frozen=True, eq=False)
class SliceConfig:
    """A homogeneous order-preserving gauge q and its unit slice {q = 1}.

    ``gauge="unorm"`` uses q(x) = ||x||_u; ``gauge="linear"`` uses
    q(x) = <weights, x> with strictly positive weights.
    """

    unit: np.ndarray
    gauge: Literal["unorm", "linear"] = "unorm"
    weights: np.ndarray | None = None

    def __post_init__(self):
        u = as_cone_array(self.unit, "unit")
        if not np.all(u > 0):
            raise ValueError("slice unit must be interior")
        object.__setattr__(self, "unit", u)
        if self.gauge == "unorm":
            object.__setattr__(self, "_inv_unit", 1.0 / u)
        elif self.gauge == "linear":
            w = as_array(self.weights if self.weights is not None else np.ones_like(u))
            if w.shape != u.shape or np.any(w <= 0):
                raise ValueError("linear gauge needs strictly positive weights of matching size")
            object.__setattr__(self, "weights", w)
        else:
            raise ValueError(f"unknown gauge {self.gauge!r}")

    @classmethod
    def default(cls, n: int) -> "SliceConfig":
        return cls(np.ones(n))

    def q(self, x: np.ndarray) -> float:
        if self.gauge == "unorm":
            return float(np.max(np.abs(x) * self._inv_unit))
        return float(self.weights @ x)

    def project(self, x: VectorLike) -> np.ndarray:
        a = as_cone_array(x)
        qx = self.q(a)
        if not qx > 0:
            raise ValueError("cannot project a vector with q(x) = 0 onto the slice")
        return a / qx

    def to_json(self) -> dict:
        d = {"kind": self.gauge, "unit": self.unit.tolist()}
        if self.gauge == "linear":
            d["weights"] = self.weights.tolist()
        return d


def project_to_slice(cfg: SliceConfig, x: VectorLike) -> np.ndarray:
    return cfg.project(x)
