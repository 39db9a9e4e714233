"""Order-preserving, positively homogeneous maps on the orthant.

Every operator is an immutable object with ``dim`` and a ``__call__`` that
evaluates it without input validation (the solver's hot path).  ``apply``
is the validating front door.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .cone import SliceConfig, VectorLike, as_array, as_cone_array, u_norm


class Operator:
    dim: int
    cone_domain = True

    def __call__(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def to_json(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError


def _square(m, name="matrix") -> np.ndarray:
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"{name} must be a nonempty square matrix")
    return a


@dataclass(frozen=True, eq=False)
class Linear(Operator):
    matrix: np.ndarray

    def __post_init__(self):
        a = _square(self.matrix)
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise ValueError("linear operator needs finite nonnegative entries")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, x):
        return self.matrix @ x

    def to_json(self):
        return {"type": "linear", "matrix": self.matrix.tolist()}


def _members(members) -> tuple[Linear, ...]:
    ms = tuple(m if isinstance(m, Linear) else Linear(m) for m in members)
    if not ms:
        raise ValueError("family needs at least one member")
    if len({m.dim for m in ms}) != 1:
        raise ValueError("family members have different dimensions")
    return ms


@dataclass(frozen=True, eq=False)
class SupFamily(Operator):
    """Rowwise supremum of finitely many nonnegative matrices."""

    members: tuple[Linear, ...]

    def __post_init__(self):
        ms = _members(self.members)
        object.__setattr__(self, "members", ms)
        object.__setattr__(self, "_stack", np.stack([m.matrix for m in ms]))

    @property
    def dim(self):
        return self.members[0].dim

    def member_values(self, x) -> np.ndarray:
        # shape (n_members, n); reduction below runs over axis 0 in index order
        return self._stack @ x

    def __call__(self, x):
        return self.member_values(x).max(axis=0)

    def to_json(self):
        return {"type": "sup", "members": [m.to_json() for m in self.members]}


@dataclass(frozen=True, eq=False)
class InfFamily(SupFamily):
    """Rowwise infimum of finitely many nonnegative matrices."""

    def __call__(self, x):
        return self.member_values(x).min(axis=0)

    def to_json(self):
        return {"type": "inf", "members": [m.to_json() for m in self.members]}


@dataclass(frozen=True, eq=False)
class MinMax(Operator):
    """result_i = max over actions a of min over opponent choices b of <row[i][a][b], x>.

    ``rows[i]`` is an array of shape (n_actions_i, n_opponent_i, n).
    """

    rows: tuple[np.ndarray, ...]

    def __post_init__(self):
        rs = []
        for i, r in enumerate(self.rows):
            a = np.array(r, dtype=float)
            if a.ndim != 3 or a.shape[0] == 0 or a.shape[1] == 0:
                raise ValueError(f"minmax row {i} must be a nonempty actions x choices x n array")
            if not np.all(np.isfinite(a)) or np.any(a < 0):
                raise ValueError(f"minmax row {i} has negative or non-finite entries")
            a.setflags(write=False)
            rs.append(a)
        n = len(rs)
        if n == 0 or any(a.shape[2] != n for a in rs):
            raise ValueError("minmax rows must have length n = number of rows")
        object.__setattr__(self, "rows", tuple(rs))

    @property
    def dim(self):
        return len(self.rows)

    def __call__(self, x):
        return np.array([(r @ x).min(axis=1).max() for r in self.rows])

    def to_json(self):
        return {"type": "minmax", "rows": [r.tolist() for r in self.rows]}


def _parse_weight(w) -> float:
    if isinstance(w, str):
        if w.strip() == "-inf":
            return -math.inf
        raise ValueError(f"unrecognised weight {w!r}; only '-inf' is accepted as a string")
    return float(w)


@dataclass(frozen=True, eq=False)
class MaxPlusConjugate(Operator):
    """x -> (max_j e^{w_ij} x_j)_i, the multiplicative conjugate of a max-plus matrix."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array([[_parse_weight(v) for v in row] for row in self.weights], dtype=float)
        w = _square(w, "weights")
        if np.any(np.isnan(w)) or np.any(w == math.inf):
            raise ValueError("max-plus weights must be real or -inf")
        if not np.all(np.isfinite(w).any(axis=1)):
            raise ValueError("every max-plus row needs a finite entry")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_gain", np.exp(w))

    @property
    def dim(self):
        return self.weights.shape[0]

    def __call__(self, x):
        return (self._gain * x).max(axis=1)

    def to_json(self):
        return {
            "type": "maxplus",
            "weights": [[v if math.isfinite(v) else "-inf" for v in row] for row in self.weights.tolist()],
        }


@dataclass(frozen=True, eq=False)
class Perturbed(Operator):
    """h_s(x) = h(x) + s q(h(x)) u."""

    base: Operator
    s: float
    unit: np.ndarray
    gauge: SliceConfig | None = None

    def __post_init__(self):
        if not (self.s > 0 and math.isfinite(self.s)):
            raise ValueError("perturbation s must be positive")
        u = as_cone_array(self.unit, "unit")
        if u.size != self.base.dim or not np.all(u > 0):
            raise ValueError("perturbation unit must be interior and of the base dimension")
        object.__setattr__(self, "unit", u)
        if self.gauge is None:
            object.__setattr__(self, "gauge", SliceConfig(u))
        elif self.gauge.unit.size != u.size:
            raise ValueError("gauge dimension mismatch")

    @property
    def dim(self):
        return self.base.dim

    def __call__(self, x):
        hx = self.base(x)
        return hx + (self.s * self.gauge.q(hx)) * self.unit

    def to_json(self):
        return {
            "type": "perturbed",
            "base": self.base.to_json(),
            "s": self.s,
            "u": self.unit.tolist(),
            "gauge": self.gauge.to_json(),
        }


@dataclass(frozen=True, eq=False)
class Power(Operator):
    base: Operator
    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("power m must be a positive integer")
        object.__setattr__(self, "m", int(self.m))

    @property
    def dim(self):
        return self.base.dim

    def __call__(self, x):
        for _ in range(self.m):
            x = self.base(x)
        return x

    def to_json(self):
        return {"type": "power", "base": self.base.to_json(), "m": self.m}


@dataclass(frozen=True, eq=False)
class WholeSpace(Operator):
    """A Linear/SupFamily/InfFamily base regarded as a map of all of R^n."""

    base: Operator
    cone_domain = False

    def __post_init__(self):
        if not isinstance(self.base, (Linear, SupFamily)):
            raise ValueError("whole-space extension needs a linear or rowwise sup/inf base")

    @property
    def dim(self):
        return self.base.dim

    def __call__(self, x):
        return self.base(x)

    def to_json(self):
        return {"type": "wholespace", "base": self.base.to_json()}


OperatorSpec = Union[Linear, SupFamily, InfFamily, MinMax, MaxPlusConjugate, Perturbed, Power, WholeSpace]


def identity(n: int) -> Linear:
    return Linear(np.eye(n))


def apply(spec: Operator, x: VectorLike) -> np.ndarray:
    """Evaluate ``spec`` at ``x`` after checking the domain."""
    if spec.cone_domain:
        a = as_cone_array(x)
    else:
        a = as_array(x)
        if not np.all(np.isfinite(a)):
            raise ValueError("x has non-finite entries")
    if a.size != spec.dim:
        raise ValueError(f"dimension mismatch: operator is {spec.dim}-dimensional, x has {a.size} entries")
    return spec(a)


# -- selections ---------------------------------------------------------------


@dataclass(frozen=True)
class SelectionWitness:
    """Per-row member index (families) or (action, opponent) pair (min-max)."""

    choices: tuple

    def matrix(self, spec: Operator) -> np.ndarray:
        if isinstance(spec, SupFamily):
            return np.stack([spec.members[a].matrix[i] for i, a in enumerate(self.choices)])
        if isinstance(spec, MinMax):
            return np.stack([spec.rows[i][a, b] for i, (a, b) in enumerate(self.choices)])
        raise TypeError(f"no selection for {type(spec).__name__}")

    def linear(self, spec: Operator) -> Linear:
        return Linear(self.matrix(spec))


def apply_with_selection(spec: Operator, x: VectorLike) -> tuple[np.ndarray, SelectionWitness]:
    """Value and the lowest-index member attaining it in every row."""
    a = as_cone_array(x)
    if isinstance(spec, SupFamily):
        vals = spec.member_values(a)
        pick = vals.argmin(axis=0) if isinstance(spec, InfFamily) else vals.argmax(axis=0)
        value = vals[pick, np.arange(spec.dim)]
        return value, SelectionWitness(tuple(int(p) for p in pick))
    if isinstance(spec, MinMax):
        value = np.empty(spec.dim)
        choices = []
        for i, r in enumerate(spec.rows):
            v = r @ a
            inner = v.argmin(axis=1)
            worst = v[np.arange(v.shape[0]), inner]
            act = int(worst.argmax())
            choices.append((act, int(inner[act])))
            value[i] = worst[act]
        return value, SelectionWitness(tuple(choices))
    raise TypeError(f"{type(spec).__name__} has no selection structure")


def restrict_to_negative_cone(spec: WholeSpace) -> Operator:
    """The cone operator y -> -h(-y) describing h on -C."""
    base = spec.base
    if isinstance(base, InfFamily):
        return SupFamily(base.members)
    if isinstance(base, SupFamily):
        return InfFamily(base.members)
    return base


def operator_norm_on_cone(spec: Operator, unit: VectorLike | None = None) -> float:
    """||h||_C in the u-norm (sup-norm by default).

    For order-preserving homogeneous h on the orthant, x <= ||x||_u u gives
    ||h||_C = ||h(u)||_u exactly.
    """
    u = np.ones(spec.dim) if unit is None else as_cone_array(unit, "unit")
    return u_norm(u, spec(u))


# -- JSON grammar ---------------------------------------------------------------


def operator_from_json(obj: dict) -> Operator:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError("operator must be a JSON object with a 'type' field")
    t = obj["type"]
    try:
        if t == "linear":
            return Linear(obj["matrix"])
        if t in ("sup", "inf"):
            members = [Linear(m["matrix"]) if isinstance(m, dict) else Linear(m) for m in obj["members"]]
            return SupFamily(members) if t == "sup" else InfFamily(members)
        if t == "minmax":
            return MinMax(obj["rows"])
        if t == "maxplus":
            return MaxPlusConjugate(obj["weights"])
        if t == "perturbed":
            base = operator_from_json(obj["base"])
            u = obj.get("u", [1.0] * base.dim)
            gauge = _gauge_from_json(obj.get("gauge"), u)
            return Perturbed(base, float(obj["s"]), u, gauge)
        if t == "power":
            return Power(operator_from_json(obj["base"]), obj["m"])
        if t == "wholespace":
            return WholeSpace(operator_from_json(obj["base"]))
    except KeyError as e:
        raise ValueError(f"operator of type {t!r} is missing field {e.args[0]!r}") from None
    raise ValueError(f"unknown operator type {t!r}")


def _gauge_from_json(obj, u) -> SliceConfig | None:
    if obj is None:
        return None
    kind = obj.get("kind", "unorm")
    return SliceConfig(obj.get("unit", u), kind, obj.get("weights"))

