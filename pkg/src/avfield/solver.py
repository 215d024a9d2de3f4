"""Constrained minimization of the average-field energy over the unit sphere.

Projected gradient descent with Armijo backtracking.  The raw projected
gradient is passed through a spectral Sobolev preconditioner
(k^2 + sigma)^-1 before stepping; this leaves the method (descent +
line search, provable per-step decrease) intact while taming the
stiffness of the spectral Laplacian.  Every accepted step decreases the
energy and every iterate is renormalized, so the recorded history is
monotone and unit-mass by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, NumericalFailureError, SolverStalledError
from .grid import GridSpec, WaveFunction, gaussian_state, inner, l2_norm
from .functional import (
    EnergyBreakdown,
    FunctionalParams,
    energy,
    energy_and_gradient,
    sphere_project,
)
from .kernels import KernelSet, kernels_for

BOUNDARY_MASS_WARN = 1e-8
MAX_BACKTRACKS = 60


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 5000
    tol_energy: float = 1e-10
    tol_grad: float = 1e-7
    step0: float = 0.1
    backtrack_shrink: float = 0.5
    armijo_c: float = 1e-4
    init: str = "gaussian"  # gaussian | gaussian_vortex | from_file | random
    seed: int | None = None
    perturbation: float = 0.1
    precondition: bool = True

    def __post_init__(self):
        if self.tol_energy <= 0 or self.tol_grad <= 0:
            raise ConfigurationError("tolerances must be positive")
        if not 0.0 < self.backtrack_shrink < 1.0:
            raise ConfigurationError("backtrack shrink must lie in (0, 1)")
        if self.init not in ("gaussian", "gaussian_vortex", "from_file", "random"):
            raise ConfigurationError(f"unknown init {self.init!r}")


@dataclass
class SolveResult:
    u: WaveFunction
    breakdown: EnergyBreakdown
    iterations: int
    converged: bool
    grad_norm: float
    boundary_mass: float
    energy_history: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def initial_state(
    spec: GridSpec, cfg: SolverConfig, warm: WaveFunction | None = None
) -> WaveFunction:
    if warm is not None:
        return warm.normalized()
    if cfg.init == "from_file":
        raise ConfigurationError("init 'from_file' requires a warm-start state")
    if cfg.init == "gaussian":
        return gaussian_state(spec)
    if cfg.init == "gaussian_vortex":
        return gaussian_state(spec, vortex=True)
    # seeded random perturbation of the gaussian
    rng = np.random.default_rng(cfg.seed)
    base = gaussian_state(spec)
    x, y = spec.meshgrid()
    env = np.exp(-(x**2 + y**2) / 2.0)
    pert = np.zeros((spec.n, spec.n), dtype=complex)
    for _ in range(6):
        kx, ky = rng.normal(scale=1.5, size=2)
        pert += (rng.normal() + 1j * rng.normal()) * np.exp(1j * (kx * x + ky * y))
    vals = base.values + cfg.perturbation * pert * env
    return WaveFunction(spec, vals).normalized()


def _preconditioner(spec: GridSpec, sigma: float) -> np.ndarray:
    kx, ky = spec.wavenumbers()
    return 1.0 / (kx**2 + ky**2 + sigma)


def minimize(
    params: FunctionalParams,
    spec: GridSpec,
    cfg: SolverConfig = SolverConfig(),
    warm_start: WaveFunction | None = None,
) -> SolveResult:
    """Minimize the average-field energy over normalized states on the grid."""
    kernels = kernels_for(spec, params.R)
    u = initial_state(spec, cfg, warm_start)
    warnings: list[str] = []
    if u.boundary_mass() > BOUNDARY_MASS_WARN:
        warnings.append(
            f"initial boundary density {u.boundary_mass():.3e} exceeds "
            f"{BOUNDARY_MASS_WARN:g}; the box may be too small"
        )

    bd, G = energy_and_gradient(u, params, kernels)
    if not np.isfinite(bd.total):
        raise NumericalFailureError("non-finite initial energy", last_state=u)
    history = [bd.total]
    tau = cfg.step0
    converged = False
    grad_norm = np.inf
    iterations = 0
    stagnant = 0  # consecutive accepted steps with below-round-off decrease

    for it in range(cfg.max_iters):
        iterations = it
        pg = sphere_project(spec, G, u)
        grad_norm = l2_norm(spec, pg)
        rel_drop = (
            abs(history[-2] - history[-1]) / max(abs(history[-1]), 1.0)
            if len(history) >= 2
            else np.inf
        )
        if grad_norm < cfg.tol_grad and (it == 0 or rel_drop < cfg.tol_energy):
            converged = True
            break
        if stagnant >= 3:
            # energy at the round-off floor; grad target may be unreachable
            converged = grad_norm < cfg.tol_grad
            break

        if cfg.precondition:
            sigma = max(1.0, abs(bd.total))
            pre = _preconditioner(spec, sigma)
            d = np.fft.ifft2(pre * np.fft.fft2(pg))
            d = sphere_project(spec, d, u)
            slope = -2.0 * inner(spec, d, G).real
            if slope >= 0.0:  # preconditioner failed to give descent
                d = pg
                slope = -2.0 * grad_norm**2
        else:
            d = pg
            slope = -2.0 * grad_norm**2

        accepted = False
        for _ in range(MAX_BACKTRACKS):
            trial_vals = u.values - tau * d
            nrm = l2_norm(spec, trial_vals)
            if nrm == 0.0 or not np.isfinite(nrm):
                tau *= cfg.backtrack_shrink
                continue
            trial = WaveFunction(spec, trial_vals / nrm)
            trial_bd = energy(trial, params, kernels)
            if not np.isfinite(trial_bd.total):
                raise NumericalFailureError(
                    "non-finite energy during line search", last_state=u
                )
            if trial_bd.total <= bd.total + cfg.armijo_c * tau * slope:
                accepted = True
                break
            tau *= cfg.backtrack_shrink
        if not accepted:
            # at numerical stationarity the line search cannot decrease further
            if grad_norm < 10.0 * cfg.tol_grad or rel_drop < cfg.tol_energy:
                converged = grad_norm < cfg.tol_grad
                break
            raise SolverStalledError(
                f"no Armijo step after {MAX_BACKTRACKS} halvings "
                f"(grad norm {grad_norm:.3e})",
                last_state=u,
            )
        drop = bd.total - trial_bd.total
        stagnant = stagnant + 1 if drop <= 4e-16 * max(1.0, abs(bd.total)) else 0
        u = trial
        bd, G = energy_and_gradient(u, params, kernels)
        history.append(bd.total)
        tau = min(tau / cfg.backtrack_shrink, 1e3)
    else:
        iterations = cfg.max_iters

    if u.boundary_mass() > BOUNDARY_MASS_WARN:
        warnings.append(
            f"final boundary density {u.boundary_mass():.3e} exceeds "
            f"{BOUNDARY_MASS_WARN:g}; the box may be too small"
        )
    return SolveResult(
        u=u,
        breakdown=bd,
        iterations=iterations,
        converged=converged,
        grad_norm=grad_norm,
        boundary_mass=u.boundary_mass(),
        energy_history=history,
        warnings=warnings,
    )


@dataclass
class SweepRow:
    axis_value: float
    breakdown: EnergyBreakdown | None
    converged: bool
    grad_norm: float
    iterations: int
    error: str | None = None
    result: SolveResult | None = None


def _apply_axis(params: FunctionalParams, axis: str, value: float) -> FunctionalParams:
    if axis == "beta":
        return replace(params, beta=value)
    if axis == "R":
        return replace(params, R=value)
    if axis == "s":
        return replace(params, trap=replace(params.trap, s=value))
    if axis == "N":
        # N does not enter the functional; rows differ only in reporting
        return params
    raise ConfigurationError(f"unknown sweep axis {axis!r}")


def sweep(
    axis: str,
    values: list[float],
    params: FunctionalParams,
    spec: GridSpec,
    cfg: SolverConfig = SolverConfig(),
) -> list[SweepRow]:
    """Minimize along one parameter axis, warm-starting in order.

    Warm starting is a continuity heuristic; if a warm-started row comes
    out above its predecessor we re-run from a cold start and keep the
    lower energy.  Per-row failures are flagged and the sweep continues.
    """
    if not values:
        raise ConfigurationError("sweep needs a non-empty value list")
    rows: list[SweepRow] = []
    warm: WaveFunction | None = None
    prev_total: float | None = None
    for value in values:
        p = _apply_axis(params, axis, value)
        try:
            res = minimize(p, spec, cfg, warm_start=warm)
            if (
                warm is not None
                and prev_total is not None
                and res.breakdown.total > prev_total + 1e-12
            ):
                cold = minimize(p, spec, cfg)
                if cold.breakdown.total < res.breakdown.total:
                    res = cold
            warm = res.u
            prev_total = res.breakdown.total
            rows.append(
                SweepRow(
                    axis_value=value,
                    breakdown=res.breakdown,
                    converged=res.converged,
                    grad_norm=res.grad_norm,
                    iterations=res.iterations,
                    result=res,
                )
            )
        except (NumericalFailureError, SolverStalledError) as exc:
            rows.append(
                SweepRow(
                    axis_value=value,
                    breakdown=None,
                    converged=False,
                    grad_norm=np.nan,
                    iterations=0,
                    error=str(exc),
                )
            )
            warm = None
            prev_total = None
    return rows
