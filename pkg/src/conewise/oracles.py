"""Brute-force references that share no code path with the regularized solver."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .operators import InfFamily, SupFamily

MAX_POLICIES = 10**6


def perron_2x2(a: float, b: float, c: float, d: float) -> float:
    """Perron root of [[a, b], [c, d]] by the quadratic formula."""
    if min(a, b, c, d) < 0:
        raise ValueError("perron_2x2 needs nonnegative entries")
    return (a + d + math.sqrt((a - d) ** 2 + 4 * b * c)) / 2


def karp_cycle_mean(weights) -> float:
    """Maximum cycle mean of a weighted digraph given as a matrix over R u {-inf}.

    D_k(v) is the heaviest walk with exactly k arcs ending at v, started from
    a virtual source joined to every node with weight 0.  Returns -inf for an
    acyclic graph.
    """
    w = np.array(weights, dtype=float)
    n = w.shape[0]
    if w.shape != (n, n):
        raise ValueError("weights must be square")
    if not np.isfinite(w).any():
        raise ValueError("weights need at least one finite entry")
    D = np.full((n + 1, n), -math.inf)
    D[0] = 0.0
    for k in range(1, n + 1):
        # D[k][v] = max_u D[k-1][u] + w[u, v]
        D[k] = np.max(D[k - 1][:, None] + w, axis=0)
    best = -math.inf
    for v in range(n):
        if D[n, v] == -math.inf:
            continue
        worst = math.inf
        for k in range(n):
            if D[k, v] > -math.inf:
                worst = min(worst, (D[n, v] - D[k, v]) / (n - k))
        best = max(best, worst)
    return best


@dataclass(frozen=True)
class BracketResult:
    lo: float
    hi: float
    iterations: int
    stalled: bool

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)


def power_bracket(matrix, x0=None, max_iter: int = 10_000, tol: float = 1e-13) -> BracketResult:
    """Tightest Collatz-Wielandt bracket m(Ax/x) <= r <= M(Ax/x) seen along power iterates."""
    A = np.array(matrix, dtype=float)
    n = A.shape[0]
    x = np.ones(n) if x0 is None else np.array(x0, dtype=float)
    if np.any(x <= 0):
        raise ValueError("power_bracket needs an interior start")
    lo, hi = 0.0, math.inf
    for it in range(1, max_iter + 1):
        y = A @ x
        if np.all(x > 0):
            ratio = y / x
            lo = max(lo, float(ratio.min()))
            hi = min(hi, float(ratio.max()))
            if hi - lo <= tol * hi:
                return BracketResult(lo, hi, it, False)
        top = y.max()
        if top == 0:
            return BracketResult(0.0, 0.0, it, False)
        x = y / top
    return BracketResult(lo, hi, max_iter, True)


def policy_matrix(family: SupFamily, policy) -> np.ndarray:
    return np.stack([family.members[a].matrix[i] for i, a in enumerate(policy)])


def matrix_perron_root(A: np.ndarray) -> float:
    """Reference Perron root: closed form for n = 2, else a closed power bracket.

    A stalled bracket (reducible or imprimitive matrix) falls back to
    LAPACK's eigenvalues.
    """
    if A.shape == (2, 2):
        return perron_2x2(*A.ravel())
    br = power_bracket(A, max_iter=5000)
    if not br.stalled:
        return br.midpoint
    return float(np.max(np.abs(np.linalg.eigvals(A))))


@dataclass(frozen=True)
class PolicyResult:
    value: float
    policy: tuple[int, ...]
    values: dict


def policy_enumeration(
    family: SupFamily,
    per_policy_oracle: Callable[[np.ndarray], float] = matrix_perron_root,
) -> PolicyResult:
    """Max (sup family) or min (inf family) Perron root over all row policies.

    Ties keep the lexicographically first policy.
    """
    k, n = len(family.members), family.dim
    if k**n > MAX_POLICIES:
        raise ValueError(f"{k}**{n} policies exceed the enumeration guard {MAX_POLICIES}")
    want_min = isinstance(family, InfFamily)
    best, arg, values = None, None, {}
    for policy in itertools.product(range(k), repeat=n):
        r = per_policy_oracle(policy_matrix(family, policy))
        values[policy] = r
        if best is None or (r < best if want_min else r > best):
            best, arg = r, policy
    return PolicyResult(best, arg, values)
