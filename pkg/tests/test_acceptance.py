"""End-to-end acceptance checks.

Each test prints one summary line with the measured quantity so the run
log doubles as a numerical report.  The heavy solves are shared through
module-scoped fixtures.
"""

import numpy as np
import pytest

from avfield.fields import density, vector_potential
from avfield.functional import FunctionalParams, energy, gradient
from avfield.geometry import (
    batch_circumradius,
    batch_cyclic_sum,
    batch_edges,
    batch_rho_sq,
    conditioning_ratio,
    counterexample_probe,
    random_triangles,
    regime_triangles,
)
from avfield.grid import (
    GridSpec,
    WaveFunction,
    inner,
    integrate,
    spectral_gradient,
)
from avfield.kernels import SmearedCoulomb, TrapPotential, kernels_for, lp_norm_grad_w
from avfield.manybody import ManyBodyParams, mixed_term_crosscheck, product_state_energy
from avfield.solver import SolverConfig, minimize, sweep

TRAP = TrapPotential()


def report(name, ok, detail):
    print(f"[{name}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"{name}: {detail}"


def smooth_state(spec, rng, phase_scale=0.5):
    x, y = spec.meshgrid()
    env = np.exp(-(x**2 + y**2) / 2.0)
    field = np.zeros((spec.n, spec.n), dtype=complex)
    for _ in range(4):
        kx, ky = rng.normal(scale=1.2, size=2)
        field += (rng.normal() + 1j * rng.normal()) * np.exp(1j * (kx * x + ky * y))
    return WaveFunction(spec, env * (1.0 + phase_scale * field)).normalized()


def abs_kinetic(spec, u):
    gx, gy = spectral_gradient(spec, np.sqrt(density(u)))
    return float(integrate(spec, np.abs(gx) ** 2 + np.abs(gy) ** 2))


@pytest.fixture(scope="module")
def spec256():
    return GridSpec(n=256, half_width=8.0)


@pytest.fixture(scope="module")
def beta1_solution(spec256):
    cfg = SolverConfig(tol_grad=1e-5)
    return minimize(FunctionalParams(beta=1.0, R=0.0, trap=TRAP), spec256, cfg)


@pytest.fixture(scope="module")
def beta1_smeared_solution(spec256):
    cfg = SolverConfig(tol_grad=1e-5)
    return minimize(FunctionalParams(beta=1.0, R=0.1, trap=TRAP), spec256, cfg)


def test_criterion_01_oscillator_baseline(spec256):
    res = minimize(FunctionalParams(beta=0.0, R=0.0, trap=TRAP), spec256)
    err = abs(res.breakdown.total - 2.0)
    report(
        "criterion 1: oscillator baseline",
        err < 1e-3 and res.converged,
        f"E = {res.breakdown.total:.10f}, |E - 2| = {err:.2e}",
    )


def test_criterion_02_gradient_correctness():
    spec = GridSpec(n=64, half_width=8.0)
    rng = np.random.default_rng(20)
    eps = 1e-5
    worst = 0.0
    for _ in range(20):
        u = smooth_state(spec, rng)
        v = smooth_state(spec, rng).values
        beta = float(rng.uniform(-2.0, 2.0))
        R = float(rng.choice([0.0, rng.uniform(0.05, 0.4)]))
        params = FunctionalParams(beta=beta, R=R, trap=TRAP)
        G = gradient(u, params)

        def e_at(t):
            return energy(WaveFunction(spec, u.values + t * v), params).total

        fd = (e_at(eps) - e_at(-eps)) / (2.0 * eps)
        pred = 2.0 * inner(spec, v, G).real
        worst = max(worst, abs(fd - pred) / max(abs(fd), 1e-12))
    report(
        "criterion 2: gradient correctness",
        worst < 1e-6,
        f"worst relative FD error over 20 tuples = {worst:.2e}",
    )


@pytest.fixture(scope="module")
def state_bank():
    spec = GridSpec(n=64, half_width=8.0)
    rng = np.random.default_rng(30)
    return spec, [smooth_state(spec, rng) for _ in range(100)]


def test_criterion_03_diamagnetic_suite(state_bank):
    spec, states = state_bank
    worst = np.inf
    cases = 0
    for i, u in enumerate(states):
        kin_abs = abs_kinetic(spec, u)
        R = 0.0 if i % 2 == 0 else 0.1
        for beta in (0.5, -0.5, 2.0, -2.0):
            bd = energy(u, FunctionalParams(beta=beta, R=R, trap=TRAP))
            worst = min(worst, bd.magnetic_kinetic - kin_abs)
            cases += 1
    report(
        "criterion 3: diamagnetic suite",
        worst > -1e-8,
        f"worst margin over {cases} cases = {worst:.3e}",
    )


def test_criterion_04_density_lower_bound(state_bank):
    spec, states = state_bank
    worst = np.inf
    for u in states:
        quart = float(integrate(spec, density(u) ** 2))
        for beta in (0.5, -0.5, 2.0, -2.0):
            bd = energy(u, FunctionalParams(beta=beta, R=0.0, trap=TRAP))
            scale = max(1.0, bd.magnetic_kinetic)
            worst = min(
                worst,
                (bd.magnetic_kinetic - 2.0 * np.pi * abs(beta) * quart) / scale,
            )
    report(
        "criterion 4: density lower bound",
        worst > -1e-6,
        f"worst scaled margin = {worst:.3e}",
    )


def thomas_fermi_oracle(beta=1.0, nr=600, r_max=3.0, iters=4000):
    """Brute-force radial minimizer of int 2 pi beta rho^2 + |x|^2 rho.

    Projected gradient descent over discrete radial densities with the
    mass constraint enforced by a weighted non-negative projection; no
    use of the known closed-form solution.
    """
    r = (np.arange(nr) + 0.5) * (r_max / nr)
    w = 2.0 * np.pi * r * (r_max / nr)  # quadrature weights

    def project(v):
        # min ||rho - v||^2 s.t. rho >= 0, sum w rho = 1
        lo, hi = -1e6, 1e6
        for _ in range(200):
            lam = 0.5 * (lo + hi)
            rho = np.maximum(v - lam * w, 0.0)
            m = float(w @ rho)
            if m > 1.0:
                lo = lam
            else:
                hi = lam
        return np.maximum(v - 0.5 * (lo + hi) * w, 0.0)

    rho = project(np.full(nr, 1.0 / (np.pi * r_max**2)))
    step = 0.02
    for _ in range(iters):
        grad = w * (4.0 * np.pi * beta * rho + r**2)
        rho = project(rho - step * grad)
    return float(w @ (2.0 * np.pi * beta * rho**2 + r**2 * rho))


def test_criterion_05_contact_bound(beta1_solution):
    tf = thomas_fermi_oracle()
    closed = 2.0 / 3.0 * np.sqrt(8.0)
    oracle_ok = abs(tf - closed) < 1e-3
    E = beta1_solution.breakdown.total
    bound = max(2.0, 1.8856)
    ok = oracle_ok and E >= bound - 1e-3
    report(
        "criterion 5: contact bound",
        ok,
        f"TF oracle = {tf:.6f} (closed form {closed:.6f}), "
        f"E(beta=1) = {E:.6f} >= {bound}",
    )


def test_criterion_06_r_to_zero_rate():
    spec = GridSpec(n=512, half_width=6.0)
    cfg = SolverConfig(tol_grad=1e-5)
    params = FunctionalParams(beta=1.0, R=0.4, trap=TRAP)
    values = [0.4, 0.2, 0.1, 0.05, 0.025]
    rows = sweep("R", values, params, spec, cfg)
    E = {row.axis_value: row.breakdown.total for row in rows}
    diffs = [abs(E[R] - E[R / 2.0]) for R in values[:-1]]
    order = float(np.polyfit(np.log(values[:-1]), np.log(diffs), 1)[0])
    report(
        "criterion 6: R->0 rate",
        0.7 <= order <= 1.3,
        f"fitted order of |E_R - E_(R/2)| = {order:.3f} "
        f"(diffs {['%.3e' % d for d in diffs]})",
    )


def test_criterion_07_beta_to_zero_limit(spec256):
    cfg = SolverConfig(tol_grad=1e-6)
    e0 = minimize(FunctionalParams(beta=0.0, R=0.0, trap=TRAP), spec256, cfg)
    betas = [0.4, 0.2, 0.1, 0.05]
    rows = sweep(
        "beta", betas, FunctionalParams(beta=0.4, R=0.0, trap=TRAP), spec256, cfg
    )
    diffs = [row.breakdown.total - e0.breakdown.total for row in rows]
    nonneg = all(d >= 0.0 for d in diffs)
    order = float(np.polyfit(np.log(betas), np.log(diffs), 1)[0])
    report(
        "criterion 7: beta->0 bosonic limit",
        nonneg and order >= 1.8,
        f"E(beta) - E0 >= 0: {nonneg}, fitted order = {order:.3f}",
    )


def test_criterion_08_geometry_suite():
    rng = np.random.default_rng(42)
    m = 1_000_000
    ok = True
    details = []
    for regime in ("mixed", "all_long", "all_short", "two_short", "one_short"):
        R = 0.3
        tri = regime_triangles(rng, m, R, regime)
        vals = batch_cyclic_sum(tri, R)
        e = np.maximum(batch_edges(tri), R)
        scale = (
            1.0 / (e[:, 0] ** 2 * e[:, 2] ** 2)
            + 1.0 / (e[:, 0] ** 2 * e[:, 1] ** 2)
            + 1.0 / (e[:, 1] ** 2 * e[:, 2] ** 2)
        )
        margin = float((vals / scale).min())
        ok &= margin >= -1e-12
        details.append(f"{regime} min={margin:.1e}")
        if regime == "all_long":
            good = conditioning_ratio(tri) > 5e-3
            rr = batch_circumradius(tri[good])
            ident = float(np.abs(vals[good] * 2.0 * rr**2 - 1.0).max())
            ok &= ident < 1e-10
            details.append(f"all-long identity err={ident:.1e}")
        if regime == "all_short":
            ident = float(
                np.abs(vals * 2.0 * R**4 / batch_rho_sq(tri) - 1.0).max()
            )
            ok &= ident < 1e-10
            details.append(f"all-short identity err={ident:.1e}")
    tri = random_triangles(rng, m)
    rr = batch_circumradius(tri)
    hardy = bool((1.0 / rr**2 <= 9.0 / batch_rho_sq(tri) + 1e-12).all())
    ok &= hardy
    probe = counterexample_probe(lambda r: np.exp(r**2 / 2.0), m, seed=77)
    ok &= probe.violations > 0
    details.append(f"hardy={hardy}, convex-profile violations={probe.violations}")
    report("criterion 8: geometry suite", ok, "; ".join(details))


def test_criterion_09_magnetic_term_bound():
    spec = GridSpec(n=128, half_width=8.0)
    rng = np.random.default_rng(50)
    kernels = kernels_for(spec, 0.0)
    worst = 0.0
    for _ in range(50):
        u = smooth_state(spec, rng)
        rho = density(u)
        A = vector_potential(spec, rho, kernels)
        lhs = float(integrate(spec, rho * (A[0] ** 2 + A[1] ** 2)))
        rhs = 1.5 * abs_kinetic(spec, u)
        worst = max(worst, lhs / rhs)
    bound_ok = worst <= 1.0

    # Monte Carlo crosscheck: int |A|^2 rho equals one sixth of the mean
    # inverse-square circumradius over iid triples drawn from rho
    mc_ok = True
    mc_details = []
    for width in (0.8, 1.0, 1.3):
        x, y = spec.meshgrid()
        vals = np.exp(-(x**2 + y**2) / (2.0 * width**2))
        u = WaveFunction(spec, vals.astype(complex)).normalized()
        rho = density(u)
        A = vector_potential(spec, rho, kernels)
        grid_val = float(integrate(spec, rho * (A[0] ** 2 + A[1] ** 2)))
        ns = 400_000
        pts = rng.normal(scale=width / np.sqrt(2.0), size=(ns, 3, 2))
        e = batch_edges(pts)
        d1 = pts[:, 1] - pts[:, 0]
        d2 = pts[:, 2] - pts[:, 0]
        area = 0.5 * np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
        inv_rr_sq = (4.0 * area / (e[:, 0] * e[:, 1] * e[:, 2])) ** 2
        sample = inv_rr_sq / 6.0
        est = float(sample.mean())
        se = float(sample.std(ddof=1) / np.sqrt(ns))
        mc_ok &= abs(est - grid_val) <= 3.0 * se
        mc_details.append(f"w={width}: grid={grid_val:.5f} mc={est:.5f}+-{se:.5f}")
    report(
        "criterion 9: magnetic-term bound",
        bound_ok and mc_ok,
        f"max ratio to 1.5*kinetic = {worst:.3f}; " + "; ".join(mc_details),
    )


def test_criterion_10_product_state_chain(beta1_smeared_solution, spec256):
    u = beta1_smeared_solution.u
    af = beta1_smeared_solution.breakdown.total
    Ns = [10, 100, 1000, 10_000]
    gaps = []
    for N in Ns:
        bd = product_state_energy(u, ManyBodyParams(N=N, beta=1.0, R=0.1, trap=TRAP))
        gaps.append(bd.per_particle_total - af)
    positive = all(g > 0 for g in gaps)
    slope = float(np.polyfit(np.log(Ns), np.log(gaps), 1)[0])
    rng = np.random.default_rng(60)
    spec64 = GridSpec(n=64, half_width=8.0)
    worst = 0.0
    for _ in range(20):
        v = smooth_state(spec64, rng)
        a, b = mixed_term_crosscheck(v, float(rng.uniform(0.1, 0.4)))
        worst = max(worst, abs(a - b) / max(abs(b), 1e-12))
    ok = positive and abs(slope + 1.0) <= 0.1 and worst < 1e-8
    report(
        "criterion 10: product-state chain",
        ok,
        f"gaps positive: {positive}, fitted exponent = {slope:.3f}, "
        f"crosscheck worst rel = {worst:.2e}",
    )


def test_criterion_11_kernel_suite():
    rng = np.random.default_rng(70)
    worst_val = 0.0
    worst_cont = 0.0
    for _ in range(1000):
        R = float(rng.uniform(0.05, 2.0))
        k = SmearedCoulomb(R)
        r_out = float(rng.uniform(R, 4.0))
        worst_val = max(worst_val, abs(float(k.w_radial(np.array(r_out))) - np.log(r_out)))
        r_in = float(rng.uniform(0.0, R))
        want = np.log(R) + 0.5 * ((r_in / R) ** 2 - 1.0)
        worst_val = max(worst_val, abs(float(k.w_radial(np.array(r_in))) - want))
        # both branch formulas evaluated at the seam r = R must coincide
        inside_at_R = np.log(R) + 0.5 * ((R / R) ** 2 - 1.0)
        worst_cont = max(worst_cont, abs(inside_at_R - np.log(R)))
    scaling_worst = 0.0
    for p in (3.0, 4.0, 8.0):
        consts = [lp_norm_grad_w(R, p) * R ** (1.0 - 2.0 / p) for R in
                  (0.05, 0.1, 0.5, 1.0, 2.0, 5.0)]
        scaling_worst = max(scaling_worst, np.ptp(consts) / consts[0])
    ok = worst_val < 1e-14 and worst_cont < 1e-14 and scaling_worst < 1e-8
    report(
        "criterion 11: kernel suite",
        ok,
        f"branch value err = {worst_val:.2e}, continuity jump = {worst_cont:.2e}, "
        f"L^p scaling spread = {scaling_worst:.2e}",
    )
