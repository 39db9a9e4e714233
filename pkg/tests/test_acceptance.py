"""The twelve acceptance criteria, each at its stated tolerance.

Every test appends one ``PASS``/``FAIL`` line to the terminal summary.  Run
``python3 -m pytest tests/test_acceptance.py -q`` or
``python3 scripts/acceptance_report.py`` to see just these lines.
"""

import math
import time
from dataclasses import dataclass

import numpy as np
import pytest

import conftest
import gen
from conewise.certificates import SuperEigenCert, check_super, family_attainment, family_cw_inf
from conewise.cone import SliceConfig, hilbert_dist, thompson_dist, upper_ratio
from conewise.operators import InfFamily, Linear, MaxPlusConjugate, SupFamily, WholeSpace
from conewise.oracles import karp_cycle_mean, perron_2x2, policy_enumeration, power_bracket
from conewise.solver import (
    bonsall_estimate,
    contraction_constant,
    eigen_solve,
    growth_rate,
    psi,
    super_eigen_join,
    uniqueness_contraction_check,
    whole_space_radius,
)

SEED = 20101016


def report(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@dataclass
class Solved:
    kind: str
    op: object
    result: object
    seconds: float


def _solve(kind, op):
    t0 = time.perf_counter()
    res = eigen_solve(op)
    return Solved(kind, op, res, time.perf_counter() - t0)


@pytest.fixture(scope="module")
def pool():
    rng = np.random.default_rng(SEED)
    out = {"linear": [], "maxplus": [], "sup": [], "inf": [], "minmax": []}
    for i in range(200):
        out["linear"].append(_solve("linear", Linear(gen.positive_matrix(rng, 2 + i % 5))))
    for i in range(100):
        w = gen.maxplus_weights(rng, 2 + i % 5, density=rng.uniform(0.5, 1.0))
        out["maxplus"].append(_solve("maxplus", MaxPlusConjugate(w)))
    for i in range(50):
        k = 1 + i % 3
        out["sup"].append(_solve("sup", gen.sup_family(rng, 4, k)))
        out["inf"].append(_solve("inf", gen.sup_family(rng, 4, k, InfFamily)))
    for i in range(20):
        out["minmax"].append(_solve("minmax", gen.minmax(rng, 2 + i % 4)))
    return out


def _all(pool):
    return [s for group in pool.values() for s in group]


def test_01_linear_agreement(pool):
    worst_pb, worst_2 = 0.0, 0.0
    for s in pool["linear"]:
        A = s.op.matrix
        r = s.result.radius
        br = power_bracket(A)
        worst_pb = max(worst_pb, abs(r - br.midpoint) / br.midpoint)
        if A.shape == (2, 2):
            ref = perron_2x2(*A.ravel())
            worst_2 = max(worst_2, abs(r - ref) / ref)
    seconds = sum(s.seconds for s in pool["linear"])
    ok = worst_pb <= 1e-8 and worst_2 <= 1e-10 and seconds < 10
    assert report(1, "linear agreement", ok, f"max rel err {worst_pb:.2e} (bracket), {worst_2:.2e} (2x2), {seconds:.2f}s")


def test_02_maxplus_agreement(pool):
    worst = 0.0
    for s in pool["maxplus"]:
        ref = math.exp(karp_cycle_mean(s.op.weights))
        worst = max(worst, abs(s.result.radius - ref) / ref)
    seconds = sum(s.seconds for s in pool["maxplus"])
    ok = worst <= 1e-8 and seconds < 10
    assert report(2, "max-plus agreement", ok, f"max rel err {worst:.2e}, {seconds:.2f}s")


def test_03_family_attainment(pool):
    bad = []
    for s in pool["sup"]:
        rep = family_attainment(s.op, s.result, tol=1e-8)
        if not rep.ok:
            bad.append(("sup", rep.messages))
    for s in pool["inf"]:
        rep = family_cw_inf(s.op, [np.ones(4)], tol=1e-8)
        if not rep.ok:
            bad.append(("inf", rep.messages))
    assert report(3, "family attainment", not bad, f"{len(pool['sup'])} sup + {len(pool['inf'])} inf families, {len(bad)} failures")


def test_04_monotone_regularization(pool):
    worst = -math.inf
    for s in _all(pool):
        lams = s.result.lambdas
        for a, b in zip(lams, lams[1:]):
            worst = max(worst, b - a)
    ok = worst <= 1e-11
    assert report(4, "monotone regularization", ok, f"largest increase lambda_(k+1) - lambda_k = {worst:.2e}")


def test_05_cw_duality(pool):
    worst_slack, worst_width, checked = 0.0, 0.0, 0
    for s in _all(pool):
        res = s.result
        if not res.eigvec.is_interior:
            continue
        checked += 1
        scale = max(1.0, res.radius)
        rows = [(r.bracket_lo, r.bracket_hi) for r in res.trace] + [res.bracket]
        for lo, hi in rows:
            worst_slack = max(worst_slack, (lo - res.radius) / scale, (res.radius - hi) / scale)
        if s.kind == "linear":
            worst_width = max(worst_width, (res.bracket[1] - res.bracket[0]) / scale)
    ok = worst_slack <= 1e-8 and worst_width < 1e-8
    assert report(5, "Collatz-Wielandt duality", ok, f"{checked} instances, slack {worst_slack:.2e}, primitive width {worst_width:.2e}")


def test_06_radius_chain(pool):
    """eigenvalue radius <= growth rate <= Bonsall radius, all three within 1e-6.

    The finite-k Bonsall estimate converges only at rate O(1/k) in the
    sup-norm, so agreement is measured in the norm adapted to the computed
    eigenvector; the sup-norm estimate is still checked as an upper bound.
    """
    worst, violations = 0.0, 0
    for s in _all(pool):
        r = s.result.radius
        x = s.result.eigvec.coords
        g = growth_rate(s.op, np.ones(s.op.dim)).rate
        b = bonsall_estimate(s.op, 30, unit=x)
        b_sup = bonsall_estimate(s.op, 30)
        tol = 1e-6 * r
        if not (r <= g + tol and g <= b + tol and r <= b_sup * (1 + 1e-12) and g <= b_sup + tol):
            violations += 1
        worst = max(worst, abs(g - r) / r, abs(b - r) / r)
    ok = violations == 0 and worst <= 1e-6
    assert report(6, "spectral radius chain", ok, f"{violations} order violations, max disagreement {worst:.2e}")


def test_07_contraction_bound():
    rng = np.random.default_rng(SEED + 7)
    worst_excess, bad_c, pairs = -math.inf, 0, 0
    for inst in range(20):
        n = 2 + inst % 5
        h = gen.operator_zoo(rng, n)["sup"]
        u = np.ones(n)
        gauge = SliceConfig(u)
        v = gauge.project(h(u))
        s = 10 ** rng.uniform(-3, 0)
        R = rng.uniform(0.05, 3.0)
        est = contraction_constant(R, upper_ratio(s * u, v))
        if not 0 < est.c < 1:
            bad_c += 1
        for _ in range(50):
            x = v * np.exp(rng.uniform(-R / 2, R / 2, n))
            y = v * np.exp(rng.uniform(-R / 2, R / 2, n))
            d = hilbert_dist(x, y)
            if d == 0:
                continue
            pairs += 1
            ratio = hilbert_dist(psi(x, s * u, gauge), psi(y, s * u, gauge)) / d
            worst_excess = max(worst_excess, ratio - est.c)
    ok = worst_excess <= 1e-12 and bad_c == 0 and pairs == 1000
    assert report(7, "contraction bound", ok, f"{pairs} pairs, max(observed - c) = {worst_excess:.3f}, c outside (0,1): {bad_c}")


def test_08_shifted_ratio_inequality():
    rng = np.random.default_rng(SEED + 8)
    worst = -math.inf
    for _ in range(10_000):
        n = int(rng.integers(2, 7))
        u = rng.uniform(0.1, 3, n)
        x = rng.uniform(0, 3, n) * (rng.random(n) < 0.8)
        if not x.any():
            x[0] = 1.0
        y = rng.uniform(0, 3, n) * (x > 0) * (rng.random(n) < 0.9)
        Myx = upper_ratio(x, y)
        Mxu = upper_ratio(u, x)
        lhs = upper_ratio(x + u, y + u)
        rhs = (max(Myx, 1.0) * Mxu + 1) / (Mxu + 1)
        worst = max(worst, (lhs - rhs) / max(1.0, rhs))
    assert report(8, "ratio inequality for x+u, y+u", worst <= 1e-12, f"10000 triples, max slack used {worst:.2e}")


def test_09_metric_suite():
    rng = np.random.default_rng(SEED + 9)
    checks = violations = 0

    def expect(cond):
        nonlocal checks, violations
        checks += 1
        violations += not cond

    names = ["linear", "sup", "inf", "minmax", "maxplus", "perturbed", "power"]
    while checks < 10_000:
        n = int(rng.integers(2, 6))
        x, y, z = (rng.uniform(0.01, 2, n) for _ in range(3))
        t = 10 ** rng.uniform(-3, 3)
        for d in (hilbert_dist, thompson_dist):
            expect(d(x, z) <= d(x, y) + d(y, z) + 1e-12)
            expect(abs(d(x, y) - d(y, x)) <= 1e-12)
        expect(abs(hilbert_dist(t * x, y) - hilbert_dist(x, y)) <= 1e-12)
        xs, ys = x / x.max(), y / y.max()
        dh, dt = hilbert_dist(xs, ys), thompson_dist(xs, ys)
        expect(0.5 * dh <= dt + 1e-12 and dt <= dh + 1e-12)
        op = gen.operator_zoo(rng, n)[names[checks % len(names)]]
        expect(hilbert_dist(op(x), op(y)) <= hilbert_dist(x, y) + 1e-12)
        expect(thompson_dist(op(x), op(y)) <= thompson_dist(x, y) + 1e-12)
    assert report(9, "metric suite", violations == 0, f"{checks} checks, {violations} violations")


def test_10_whole_space_identity():
    rng = np.random.default_rng(SEED + 10)
    bad = []
    for i in range(30):
        fam = gen.sup_family(rng, 2 + i % 3, 1 + i % 3)
        wr = whole_space_radius(WholeSpace(fam))
        r_c = policy_enumeration(fam).value
        r_mc = policy_enumeration(InfFamily(fam.members)).value
        scale = max(1.0, r_c)
        if abs(wr.r_C.radius - r_c) > 1e-8 * scale or abs(wr.r_minus_C.radius - r_mc) > 1e-8 * scale:
            bad.append(f"instance {i}: cone radii disagree with policy oracle")
        if abs(wr.r_X - max(r_c, r_mc)) > 1e-8 * scale:
            bad.append(f"instance {i}: r_X != max(r_C, r_-C)")
        if wr.r_minus_C.radius > wr.r_C.radius * (1 + 1e-10):
            bad.append(f"instance {i}: r_-C > r_C")
        g = growth_rate(WholeSpace(fam), rng.normal(size=fam.dim)).rate
        if g > wr.r_X * (1 + 1e-6):
            bad.append(f"instance {i}: whole-space orbit grows faster than r_X")
    assert report(10, "whole-space identity", not bad, f"30 instances, {len(bad)} failures" + (f" ({bad[0]})" if bad else ""))


def test_11_uniqueness_contraction():
    rng = np.random.default_rng(SEED + 11)
    worst_rate, worst_resid, bad = -math.inf, 0.0, 0
    for i in range(30):
        fam = gen.sup_family(rng, 2 + i % 4, 1 + i % 3)
        r_x = whole_space_radius(WholeSpace(fam)).r_X
        target = rng.uniform(0.3, 0.95)
        sub = WholeSpace(SupFamily([m.matrix * (target / r_x) for m in fam.members]))
        rep = uniqueness_contraction_check(sub, trials=5, seed=i)
        if not rep.contracting or not rep.sandwich_ok:
            bad += 1
        worst_rate = max(worst_rate, max(rep.decay_rates) - rep.r_X)
        crit = WholeSpace(SupFamily([m.matrix / r_x for m in fam.members]))
        rep = uniqueness_contraction_check(crit, trials=2, seed=i)
        if rep.witness is None or not np.any(rep.witness):
            bad += 1
        else:
            worst_resid = max(worst_resid, rep.witness_residual)
    ok = bad == 0 and worst_rate <= 1e-4 and worst_resid < 1e-8
    assert report(11, "uniqueness implies contraction", ok, f"max(rate - r_X) {worst_rate:.2e}, witness residual {worst_resid:.2e}, {bad} failures")


def _join_instances(rng):
    """(operator, m, period point x_m, r) for permutation-like and block-cyclic maps."""
    out = []
    for i in range(10):
        n = 2 + i % 5
        perm = np.roll(np.eye(n), 1, axis=1)
        w = rng.uniform(0.5, 2.0, n)
        A = w[:, None] * perm
        r = float(np.prod(w)) ** (1 / n)
        x = rng.uniform(0, 1, n) * (rng.random(n) < 0.7)
        x[0] = 1.0
        out.append((Linear(A), n, x, r))
        weights = np.where(perm > 0, np.log(w)[:, None] * perm, -math.inf)
        mp = MaxPlusConjugate(weights)
        out.append((mp, n, x, math.exp(karp_cycle_mean(weights))))
    for i in range(10):
        sizes = list(rng.integers(1, 4, size=2 + i % 3))
        A = gen.imprimitive(rng, sizes)
        m = len(sizes)
        starts = np.cumsum([0] + sizes)
        B = np.linalg.matrix_power(A, m)[: sizes[0], : sizes[0]]
        res = eigen_solve(Linear(B))
        x = np.zeros(A.shape[0])
        x[starts[0] : starts[1]] = res.eigvec.coords
        out.append((Linear(A), m, x, res.radius ** (1 / m)))
    return out


def test_12_join_construction():
    rng = np.random.default_rng(SEED + 12)
    failures, worst = 0, 0.0
    instances = _join_instances(rng)
    for op, m, x, r in instances:
        z = super_eigen_join(op, m, x, r)
        verdict = check_super(op, SuperEigenCert(z, r), rtol=1e-10)
        failures += not verdict.accepted
        worst = max(worst, verdict.violation)
    ok = failures == 0
    assert report(12, "join construction", ok, f"{len(instances)} instances, {failures} rejected, worst violation {worst:.2e}")
