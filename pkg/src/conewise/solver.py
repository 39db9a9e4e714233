"""Spectral radius and eigenvectors via the regularized contraction scheme.

For s > 0 the perturbed map h_s(x) = h(x) + s q(h(x)) u sends the cone into
its interior, and its normalization g_s = Psi_{su} o h is a Hilbert-metric
contraction on bounded subsets of the slice {q = 1}.  Its fixed point x_s
solves h_s(x_s) = lambda_s x_s, lambda_s equals the Collatz-Wielandt number
of h_s, and lambda_s decreases to r_C(h) as s decreases to 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Literal, Sequence

import numpy as np

from .cone import (
    ConeVector,
    SliceConfig,
    VectorLike,
    as_array,
    as_cone_array,
    hilbert_dist_interior,
    lattice_parts,
    lower_ratio,
    u_norm,
    upper_ratio,
)
from .operators import Operator, WholeSpace, restrict_to_negative_cone

log = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    """Iteration cap exceeded; ``last`` carries the final iterate."""

    def __init__(self, message: str, last: np.ndarray | None = None):
        super().__init__(message)
        self.last = last


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for :func:`eigen_solve`.

    ``schedule="geometric"`` uses s_k = s0 * ratio**(k-1); ``"harmonic"`` uses
    s_k = s0 / k.  An explicit ``s_values`` overrides both.  ``damping`` is
    the weight of the previous iterate in the geometric-mean averaging of the
    inner iteration (0 gives the plain fixed-point iteration).
    """

    schedule: Literal["geometric", "harmonic"] = "geometric"
    s0: float = 1.0
    ratio: float = 0.1
    s_values: tuple[float, ...] | None = None
    inner_tol: float = 1e-12
    outer_tol: float = 1e-10
    max_inner: int = 100_000
    max_outer: int = 60
    unit: tuple[float, ...] | None = None
    gauge: Literal["unorm", "linear"] = "unorm"
    weights: tuple[float, ...] | None = None
    damping: float = 0.5
    warm_start: bool = True

    def __post_init__(self):
        if self.inner_tol <= 0 or self.outer_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not 0 <= self.damping < 1:
            raise ValueError("damping must lie in [0, 1)")
        if self.schedule not in ("geometric", "harmonic"):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if not 0 < self.ratio < 1:
            raise ValueError("geometric ratio must lie in (0, 1)")
        s = self.s_sequence()
        if any(v <= 0 for v in s) or any(b >= a for a, b in zip(s, s[1:])):
            raise ValueError("s schedule must be positive and strictly decreasing")

    def s_sequence(self) -> list[float]:
        if self.s_values is not None:
            return [float(v) for v in self.s_values]
        if self.schedule == "harmonic":
            return [self.s0 / k for k in range(1, self.max_outer + 1)]
        return [self.s0 * self.ratio**k for k in range(self.max_outer)]

    def unit_vector(self, n: int) -> np.ndarray:
        u = np.ones(n) if self.unit is None else as_cone_array(self.unit, "unit")
        if u.size != n:
            raise ValueError(f"configured unit has {u.size} entries, operator has dimension {n}")
        return u

    def slice_for(self, n: int) -> SliceConfig:
        u = self.unit_vector(n)
        return SliceConfig(u, self.gauge, None if self.weights is None else np.asarray(self.weights))

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        d = dict(d)
        for key in ("s_values", "unit", "weights"):
            if d.get(key) is not None:
                d[key] = tuple(float(v) for v in d[key])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown solver config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class TraceRow:
    s: float
    lam: float
    inner_iters: int
    bracket_lo: float
    bracket_hi: float
    residual: float


@dataclass
class EigenSolveResult:
    radius: float
    eigvec: ConeVector
    residual: float
    trace: list[TraceRow]
    bracket: tuple[float, float]
    converged: bool
    degenerate: bool = False
    bracket_closed: bool = False
    eigvec_stable: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def lambdas(self) -> list[float]:
        return [row.lam for row in self.trace]

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "eigvec": self.eigvec.tolist(),
            "residual": self.residual,
            "bracket": list(self.bracket),
            "converged": self.converged,
            "degenerate": self.degenerate,
            "bracket_closed": self.bracket_closed,
            "eigvec_stable": self.eigvec_stable,
            "notes": list(self.notes),
            "trace": [
                {
                    "s": r.s,
                    "lambda": r.lam,
                    "inner_iters": r.inner_iters,
                    "bracket_lo": r.bracket_lo,
                    "bracket_hi": r.bracket_hi,
                    "residual": r.residual,
                }
                for r in self.trace
            ],
        }


@dataclass(frozen=True)
class ContractionEstimate:
    R: float
    M0: float
    mu: float
    c: float


@dataclass(frozen=True)
class GrowthReport:
    rate: float
    increments: np.ndarray
    window: int
    hit_zero: bool = False


# -- elementary estimates ------------------------------------------------------


def _lcm_upto(n: int) -> int:
    return reduce(math.lcm, range(1, n + 1), 1)


def _sup(x: np.ndarray) -> float:
    return float(np.max(np.abs(x)))


def growth_rate(spec: Operator, x0: VectorLike, horizon: int = 1200) -> GrowthReport:
    """Estimate limsup ||h^k(x0)||^(1/k) from a renormalized orbit.

    Returns exp of the mean log-norm increment over a tail window.  The
    window is a multiple of lcm(1..n) when that fits, so eventually periodic
    increments (imprimitive or max-plus orbits) average exactly.
    """
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    x = as_array(x0) if not spec.cone_domain else as_cone_array(x0)
    if not np.any(x):
        raise ValueError("x0 must be nonzero")
    x = x / _sup(x)
    inc = np.empty(horizon)
    for k in range(horizon):
        y = spec(x)
        nrm = _sup(y)
        if nrm == 0:
            return GrowthReport(0.0, inc[:k], 0, hit_zero=True)
        inc[k] = math.log(nrm)
        x = y / nrm
    half = horizon // 2
    L = _lcm_upto(min(spec.dim, 20))
    window = (half // L) * L if L <= half else half
    return GrowthReport(math.exp(float(inc[-window:].mean())), inc, window)


def bonsall_estimate(spec: Operator, k_max: int, unit: VectorLike | None = None) -> float:
    """min over k <= k_max of ||h^k||_C^(1/k), an upper bound on r_C(h).

    The operator norm is taken in the u-norm (sup-norm by default), where it
    equals ||h^k(u)||_u exactly; the Bonsall radius is the same in every
    equivalent norm.
    """
    u = np.ones(spec.dim) if unit is None else as_cone_array(unit, "unit")
    if not np.all(u > 0):
        raise ValueError("unit must be interior")
    x = u.copy()
    log_norm = 0.0
    best = math.inf
    for k in range(1, k_max + 1):
        y = spec(x)
        nrm = u_norm(u, y)
        if nrm == 0:
            return 0.0
        log_norm += math.log(nrm)
        best = min(best, math.exp(log_norm / k))
        x = y / nrm
    return best


def cw_upper(spec: Operator, u: VectorLike) -> float:
    """M(h(u)/u): a member of the Collatz-Wielandt feasible set, hence >= r_C(h)."""
    ua = as_cone_array(u, "u")
    if not np.all(ua > 0):
        raise ValueError("Collatz-Wielandt test vectors must be interior")
    return upper_ratio(ua, spec(ua))


def cw_bracket(spec: Operator, x: VectorLike) -> tuple[float, float]:
    """(m(h(x)/x), M(h(x)/x)); brackets r_C(h) when x is interior."""
    xa = as_cone_array(x)
    hx = spec(xa)
    return lower_ratio(xa, hx), upper_ratio(xa, hx)


def contraction_constant(R: float, M0: float) -> ContractionEstimate:
    """Contraction factor of Psi_u on the Hilbert ball B_R(v), M0 = M(v/u)."""
    if not R > 0:
        raise ValueError("R must be positive")
    if not M0 > 0:
        raise ValueError("M0 must be positive")
    mu = 1.0 / (math.exp(R) * M0 + 1.0)
    # log(mu + (1 - mu) e^{2R}) = log1p((1 - mu) expm1(2R))
    c = math.log1p((1.0 - mu) * math.expm1(2 * R)) / (2 * R)
    return ContractionEstimate(R, M0, mu, c)


def psi(x: np.ndarray, unit: np.ndarray, gauge: SliceConfig) -> np.ndarray:
    """Psi_u(x) = Phi_u(x) / q(Phi_u(x)) with Phi_u(x) = x + q(x) u."""
    phi = x + gauge.q(x) * unit
    return phi / gauge.q(phi)


# -- regularized scheme ----------------------------------------------------------


def regularized_inner_solve(
    spec: Operator,
    s: float,
    config: SolverConfig | None = None,
    x0: VectorLike | None = None,
) -> tuple[np.ndarray, float, int]:
    """Fixed point x_s of g_s = Psi_{su} o h on the slice, and lambda_s = q(h_s(x_s)).

    Stops when the Hilbert distance between an iterate and its image under
    g_s drops below ``inner_tol``.
    """
    cfg = config or SolverConfig()
    if not s > 0:
        raise ValueError("s must be positive")
    gauge = cfg.slice_for(spec.dim)
    u = gauge.unit
    su = s * u
    x = gauge.project(u if x0 is None else x0)
    if not np.all(x > 0):
        x = gauge.project(x + gauge.q(x) * su)
    a = cfg.damping
    for it in range(1, cfg.max_inner + 1):
        hx = spec(x)
        hs = hx + gauge.q(hx) * su
        g = hs / gauge.q(hs)
        step = hilbert_dist_interior(x, g)
        if step < cfg.inner_tol:
            x = g
            break
        if a:
            g = gauge.project(x**a * g ** (1 - a))
        x = g
    else:
        raise ConvergenceError(f"inner iteration did not converge in {cfg.max_inner} steps at s={s:g}", x)
    hx = spec(x)
    lam = gauge.q(hx + gauge.q(hx) * su)
    return x, lam, it


def _power_iterates_to_zero(spec: Operator) -> np.ndarray | None:
    """If h^n(1) = 0, the last nonzero iterate (an eigenvector for 0)."""
    x = np.ones(spec.dim)
    for _ in range(spec.dim + 1):
        y = spec(x)
        top = y.max()
        if top == 0:
            return x
        x = y / top
    return None


def eigen_solve(spec: Operator, config: SolverConfig | None = None) -> EigenSolveResult:
    """Cone spectral radius r_C(h) and an eigenvector by the regularized scheme.

    Runs the inner solve along the s schedule (warm-started from the previous
    x_s) and stops once consecutive lambda_s differ by less than
    ``outer_tol``.  The returned radius is M(h(x)/x) at the final x_s: the
    tightest upper bound certified by that point, never above lambda_s.
    """
    cfg = config or SolverConfig()
    if isinstance(spec, WholeSpace):
        spec = spec.base
    n = spec.dim
    gauge = cfg.slice_for(n)
    u = gauge.unit

    null_vec = _power_iterates_to_zero(spec)
    if null_vec is not None:
        v = gauge.project(null_vec)
        return EigenSolveResult(
            radius=0.0,
            eigvec=ConeVector(v),
            residual=_sup(spec(v)) / _sup(v),
            trace=[],
            bracket=cw_bracket(spec, u),
            converged=True,
            degenerate=True,
            notes=["h^n vanishes: radius 0 with a boundary eigenvector"],
        )

    trace: list[TraceRow] = []
    x = u
    prev_x = None
    converged = False
    for s in cfg.s_sequence():
        try:
            x, lam, iters = regularized_inner_solve(spec, s, cfg, x if cfg.warm_start else None)
        except ConvergenceError as e:
            log.warning("stopping schedule: %s", e)
            if e.last is not None:
                x = e.last
            break
        lo, hi = cw_bracket(spec, x)
        trace.append(TraceRow(s, lam, iters, lo, hi, _sup(spec(x) - lam * x) / _sup(x)))
        if len(trace) >= 2 and abs(trace[-2].lam - lam) < cfg.outer_tol:
            converged = True
            break
        prev_x = x

    notes = []
    if not trace:
        raise ConvergenceError("no inner solve converged", x)
    if not converged:
        notes.append("outer schedule exhausted before lambda_s settled")
    lo, hi = cw_bracket(spec, x)
    radius = min(hi, trace[-1].lam)
    residual = _sup(spec(x) - radius * x) / _sup(x)
    closed = hi - lo <= 1e-8 * max(1.0, hi)
    if not closed:
        notes.append("bracket not closed")
    stable = prev_x is None or _sup(x - prev_x) <= math.sqrt(cfg.outer_tol)
    if not stable:
        notes.append("eigenvector iterates not Cauchy at the last step")
    return EigenSolveResult(
        radius=radius,
        eigvec=ConeVector(x),
        residual=residual,
        trace=trace,
        bracket=(lo, hi),
        converged=converged,
        bracket_closed=closed,
        eigvec_stable=stable,
        notes=notes,
    )


# -- constructions around the eigenproblem ---------------------------------------


def super_eigen_join(
    spec: Operator, m: int, x_m: VectorLike, r: float, tol: float = 1e-10
) -> np.ndarray:
    """z = x_m v h(x_m)/r v ... v h^{m-1}(x_m)/r^{m-1}, which satisfies h(z) >= r z.

    Requires x_m to be a period-m eigenpoint: ||h^m(x_m) - r^m x_m|| <= tol r^m ||x_m||.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if not r > 0:
        raise ValueError("r must be positive")
    x = as_cone_array(x_m, "x_m")
    if not np.any(x):
        raise ValueError("x_m must be nonzero")
    iterates = [x]
    for _ in range(m):
        iterates.append(spec(iterates[-1]) / r)
    resid = _sup(iterates[m] - x) / _sup(x)
    if resid > tol:
        raise ValueError(f"x_m is not a period-{m} eigenpoint: relative residual {resid:.3e} > {tol:.1e}")
    return np.maximum.reduce(iterates[:m])


@dataclass
class WholeSpaceRadius:
    r_X: float
    r_C: EigenSolveResult
    r_minus_C: EigenSolveResult


def whole_space_radius(spec: WholeSpace, config: SolverConfig | None = None) -> WholeSpaceRadius:
    """r_X = max(r_C, r_{-C}) with both cone radii from :func:`eigen_solve`."""
    plus = eigen_solve(spec.base, config)
    minus = eigen_solve(restrict_to_negative_cone(spec), config)
    return WholeSpaceRadius(max(plus.radius, minus.radius), plus, minus)


@dataclass
class UniquenessReport:
    r_X: float
    r_C: float
    r_minus_C: float
    contracting: bool
    decay_rates: list[float]
    sandwich_ok: bool
    witness: np.ndarray | None = None
    witness_residual: float | None = None


def uniqueness_contraction_check(
    spec: WholeSpace,
    config: SolverConfig | None = None,
    trials: int = 10,
    seed: int = 0,
    horizon: int = 1200,
    tol: float = 1e-8,
) -> UniquenessReport:
    """Either geometric decay of sampled orbits (r_X < 1) or a nonzero fixed-point witness.

    Orbits start at random points of R^n, not only of the cone; the bound
    ||h^k(x)|| <= ||h^k(x+)|| + 2 ||h^k(-x-)|| from the lattice decomposition
    is checked along the way.
    """
    wr = whole_space_radius(spec, config)
    rng = np.random.default_rng(seed)
    rates = []
    sandwich_ok = True
    for _ in range(trials):
        x = rng.normal(size=spec.dim)
        rates.append(growth_rate(spec, x, horizon).rate)
        xp, xm = lattice_parts(x)
        a, b, c = x, xp, -xm
        for _ in range(50):
            a, b, c = spec(a), spec(b), spec(c)
            if _sup(a) > _sup(b) + 2 * _sup(c) + 1e-12 * (1 + _sup(a)):
                sandwich_ok = False
            if not (np.all(c <= a + 1e-12 * (1 + np.abs(a))) and np.all(a <= b + 1e-12 * (1 + np.abs(b)))):
                sandwich_ok = False
    report = UniquenessReport(
        r_X=wr.r_X,
        r_C=wr.r_C.radius,
        r_minus_C=wr.r_minus_C.radius,
        contracting=wr.r_X < 1 - tol,
        decay_rates=rates,
        sandwich_ok=sandwich_ok,
    )
    if not report.contracting:
        if wr.r_C.radius >= wr.r_minus_C.radius:
            w = wr.r_C.eigvec.coords.copy()
        else:
            w = -wr.r_minus_C.eigvec.coords
        report.witness = w
        report.witness_residual = _sup(spec(w) - wr.r_X * w) / _sup(w)
    return report


def trace_rows_csv(result: EigenSolveResult) -> Sequence[Sequence[float]]:
    return [(r.s, r.lam, r.inner_iters, r.bracket_lo, r.bracket_hi, r.residual) for r in result.trace]
