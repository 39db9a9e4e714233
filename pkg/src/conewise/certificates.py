"""Independently checkable sub-/super-eigenvector and eigenpair certificates.

An accepted sub-certificate h(u) <= lambda u with u interior bounds r_C(h)
from above; an accepted super-certificate h(v) >= mu v with v != 0 bounds it
from below.  Comparisons are relative to the scale of each coordinate, so
acceptance is invariant under rescaling of the certificate vector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .cone import as_cone_array
from .operators import InfFamily, Operator, SupFamily, apply_with_selection
from .oracles import policy_enumeration
from .solver import EigenSolveResult, SolverConfig, cw_upper, eigen_solve, growth_rate

RTOL = 1e-12


@dataclass(frozen=True)
class SubEigenCert:
    u: np.ndarray
    lam: float


@dataclass(frozen=True)
class SuperEigenCert:
    v: np.ndarray
    mu: float


@dataclass(frozen=True)
class EigenPairCert:
    x: np.ndarray
    r: float
    tol: float = 1e-8


Certificate = SubEigenCert | SuperEigenCert | EigenPairCert


@dataclass
class Verdict:
    accepted: bool
    kind: str
    worst_index: int | None = None
    violation: float = 0.0
    message: str = ""

    def line(self) -> str:
        status = "PASS" if self.accepted else "FAIL"
        where = "" if self.worst_index is None else f" index={self.worst_index}"
        return f"{status} {self.kind}{where} violation={self.violation:.3e} {self.message}".rstrip()


def check_sub(spec: Operator, cert: SubEigenCert, rtol: float = RTOL) -> Verdict:
    """Accept iff h(u) <= lambda u (1 + rtol) componentwise, u interior."""
    u = as_cone_array(cert.u, "u")
    if not np.all(u > 0):
        raise ValueError("sub-eigenvector certificates need an interior u")
    scale = cert.lam * u
    excess = spec(u) - scale * (1 + rtol)
    i = int(np.argmax(excess))
    if excess[i] > 0:
        return Verdict(False, "sub", i, float(excess[i]), f"h(u)_{i} exceeds lambda*u_{i}")
    return Verdict(True, "sub", None, 0.0, f"r_C(h) <= {cert.lam!r}")


def check_super(spec: Operator, cert: SuperEigenCert, rtol: float = RTOL) -> Verdict:
    """Accept iff h(v) >= mu v (1 - rtol) componentwise, v != 0."""
    v = as_cone_array(cert.v, "v")
    if not np.any(v):
        raise ValueError("super-eigenvector certificates need v != 0")
    deficit = cert.mu * v * (1 - rtol) - spec(v)
    i = int(np.argmax(deficit))
    if deficit[i] > 0:
        return Verdict(False, "super", i, float(deficit[i]), f"h(v)_{i} falls short of mu*v_{i}")
    return Verdict(True, "super", None, 0.0, f"r_C(h) >= {cert.mu!r}")


def check_pair(spec: Operator, cert: EigenPairCert) -> Verdict:
    """Accept iff ||h(x) - r x||_inf <= tol ||x||_inf."""
    x = as_cone_array(cert.x, "x")
    if not np.any(x):
        raise ValueError("eigenpair certificates need x != 0")
    err = np.abs(spec(x) - cert.r * x)
    i = int(np.argmax(err))
    rel = float(err[i] / np.max(x))
    if rel > cert.tol:
        return Verdict(False, "pair", i, rel, "eigen-residual above tolerance")
    return Verdict(True, "pair", None, rel, f"h(x) = {cert.r!r} x")


def check(spec: Operator, cert: Certificate) -> Verdict:
    if isinstance(cert, SubEigenCert):
        return check_sub(spec, cert)
    if isinstance(cert, SuperEigenCert):
        return check_super(spec, cert)
    return check_pair(spec, cert)


# -- JSON ----------------------------------------------------------------------


def cert_to_json(cert: Certificate) -> dict:
    if isinstance(cert, SubEigenCert):
        return {"kind": "sub", "vector": np.asarray(cert.u).tolist(), "value": cert.lam}
    if isinstance(cert, SuperEigenCert):
        return {"kind": "super", "vector": np.asarray(cert.v).tolist(), "value": cert.mu}
    return {"kind": "pair", "vector": np.asarray(cert.x).tolist(), "value": cert.r, "tol": cert.tol}


def cert_from_json(obj: dict) -> Certificate:
    """Parse a certificate; an eigen-solve result JSON is read as an eigenpair."""
    if "kind" not in obj and "eigvec" in obj and "radius" in obj:
        return EigenPairCert(np.asarray(obj["eigvec"], dtype=float), float(obj["radius"]))
    kind = obj.get("kind")
    vec = np.asarray(obj["vector"], dtype=float)
    val = float(obj["value"])
    if kind == "sub":
        return SubEigenCert(vec, val)
    if kind == "super":
        return SuperEigenCert(vec, val)
    if kind == "pair":
        return EigenPairCert(vec, val, float(obj.get("tol", 1e-8)))
    raise ValueError(f"unknown certificate kind {kind!r}")


def load_certificates(text: str) -> list[Certificate]:
    obj = json.loads(text)
    items = obj if isinstance(obj, list) else [obj]
    return [cert_from_json(o) for o in items]


# -- composite reports ---------------------------------------------------------


@dataclass
class SandwichReport:
    growth: float
    lower: float
    upper: float
    ok: bool


def sandwich_growth(
    spec: Operator,
    x,
    sub: SubEigenCert,
    sup: SuperEigenCert,
    a: float,
    b: float,
    horizon: int = 1200,
    eps: float = 1e-6,
) -> SandwichReport:
    """Check a v <= x <= b u, then mu - eps <= growth rate of x <= lambda + eps."""
    xa = as_cone_array(x)
    lo_gap = a * np.asarray(sup.v) - xa
    if np.any(lo_gap > RTOL * np.abs(xa)):
        raise ValueError(f"a*v <= x fails at index {int(np.argmax(lo_gap))}")
    hi_gap = xa - b * np.asarray(sub.u)
    if np.any(hi_gap > RTOL * np.abs(xa)):
        raise ValueError(f"x <= b*u fails at index {int(np.argmax(hi_gap))}")
    for verdict in (check_sub(spec, sub), check_super(spec, sup)):
        if not verdict.accepted:
            raise ValueError(f"certificate rejected: {verdict.line()}")
    g = growth_rate(spec, xa, horizon).rate
    return SandwichReport(g, sup.mu, sub.lam, sup.mu - eps <= g <= sub.lam + eps)


@dataclass
class AttainmentReport:
    family_radius: float
    policy_max: float
    optimal_policy: tuple[int, ...]
    witness_policy: tuple[int, ...]
    witness_radius: float
    member_max: float
    ok: bool
    messages: list[str] = field(default_factory=list)


def family_attainment(
    family: SupFamily,
    solved: EigenSolveResult | None = None,
    config: SolverConfig | None = None,
    tol: float = 1e-8,
) -> AttainmentReport:
    """r(sup family) = max over row policies of r(policy), attained by the selection at the eigenvector.

    The index set of a rowwise family is the set of all row policies; the
    listed members are a subset, so their maximum is reported but may be
    strictly smaller.
    """
    if isinstance(family, InfFamily):
        raise TypeError("family_attainment is for sup families; use family_cw_inf")
    res = solved or eigen_solve(family, config)
    enum = policy_enumeration(family)
    _, witness = apply_with_selection(family, res.eigvec)
    w_policy = tuple(witness.choices)
    w_radius = enum.values[w_policy]
    member_max = max(enum.values[(k,) * family.dim] for k in range(len(family.members)))
    msgs = []
    scale = max(1.0, enum.value)
    ok = True
    if abs(res.radius - enum.value) > tol * scale:
        ok = False
        msgs.append(f"r(family)={res.radius!r} != max_policy r={enum.value!r}")
    if abs(w_radius - enum.value) > tol * scale:
        ok = False
        msgs.append(f"selected policy {w_policy} has r={w_radius!r}, not the maximum")
    return AttainmentReport(res.radius, enum.value, enum.policy, w_policy, w_radius, member_max, ok, msgs)


@dataclass
class CwInfReport:
    family_cw: float
    policy_min: float
    optimal_policy: tuple[int, ...]
    sample_upper_bounds: list[float]
    bracket: tuple[float, float]
    attained: bool
    ok: bool
    messages: list[str] = field(default_factory=list)


def family_cw_inf(
    family: InfFamily,
    u_samples=None,
    config: SolverConfig | None = None,
    tol: float = 1e-6,
) -> CwInfReport:
    """cw(inf family) = min over row policies of their Collatz-Wielandt numbers.

    ``u_samples`` are interior test vectors; each M(f(u)/u) must bound the
    family's cw from above.
    """
    if not isinstance(family, InfFamily):
        raise TypeError("family_cw_inf needs an inf family")
    res = eigen_solve(family, config)
    enum = policy_enumeration(family)
    uppers = [cw_upper(family, u) for u in (u_samples if u_samples is not None else [])]
    msgs = []
    ok = True
    attained = res.eigvec.is_interior and res.bracket_closed
    scale = max(1.0, enum.value)
    if abs(res.radius - enum.value) > tol * scale:
        ok = False
        msgs.append(f"cw(family)={res.radius!r} != min_policy r={enum.value!r}")
    bad = [v for v in uppers if v < res.radius - tol * scale]
    if bad:
        ok = False
        msgs.append(f"{len(bad)} sample bound(s) below the solved cw")
    if not attained:
        msgs.append("infimum not attained at an interior point; bracket reported")
    return CwInfReport(res.radius, enum.value, enum.policy, uppers, res.bracket, attained, ok, msgs)


def best_sub_certificate(spec: Operator, result: EigenSolveResult) -> SubEigenCert | None:
    """Sub-certificate from an interior eigen-solve point; lambda is the best bound found, not claimed optimal."""
    x = result.eigvec.coords
    if not np.all(x > 0):
        return None
    return SubEigenCert(x, cw_upper(spec, x))

