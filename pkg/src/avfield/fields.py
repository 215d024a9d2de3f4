"""Derived physical fields: density, current, self-consistent vector potential.

The vector potential is the perpendicular-gradient convolution
A[rho] = (-d2 w_R, d1 w_R) * rho, which is divergence-free by
construction and satisfies curl A = 2 pi (rho smeared over the disc)
(= 2 pi rho for R = 0).
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalConsistencyError
from .grid import GridSpec, WaveFunction, convolve, spectral_gradient
from .kernels import KernelSet

# Imaginary residue in the current below this is round-off and discarded;
# above IMAG_HARD_TOL it signals a bug and raises.
IMAG_DROP_TOL = 1e-12
IMAG_HARD_TOL = 1e-8


def density(u: WaveFunction) -> np.ndarray:
    """Pointwise |u|^2."""
    return np.abs(u.values) ** 2


def current(u: WaveFunction) -> np.ndarray:
    """Phase current density J[u] = (i/2)(u grad conj(u) - conj(u) grad u).

    Shape (2, n, n), real.  Equals rho * grad(phase) for u = sqrt(rho) e^{i phi}.
    """
    ux, uy = spectral_gradient(u.grid, u.values)
    v = u.values
    jx = 0.5j * (v * np.conj(ux) - np.conj(v) * ux)
    jy = 0.5j * (v * np.conj(uy) - np.conj(v) * uy)
    scale = max(float(np.abs(jx).max()), float(np.abs(jy).max()), 1.0)
    residue = max(float(np.abs(jx.imag).max()), float(np.abs(jy.imag).max()))
    if residue > IMAG_HARD_TOL * scale:
        raise NumericalConsistencyError(
            f"current has imaginary residue {residue:.3e} (scale {scale:.3e})"
        )
    return np.stack([jx.real, jy.real], axis=0)


def vector_potential(spec: GridSpec, rho: np.ndarray, kernels: KernelSet) -> np.ndarray:
    """A^R[rho] = perp-grad w_R * rho, shape (2, n, n)."""
    gx, gy = kernels.grad_w_fft
    ax = -convolve(spec, rho, gy)
    ay = convolve(spec, rho, gx)
    return np.stack([ax, ay], axis=0)


def curl_A(spec: GridSpec, A: np.ndarray) -> np.ndarray:
    """Spectral curl d1 A2 - d2 A1."""
    a2x, _ = spectral_gradient(spec, A[1])
    _, a1y = spectral_gradient(spec, A[0])
    return (a2x - a1y).real


def divergence(spec: GridSpec, A: np.ndarray) -> np.ndarray:
    a1x, _ = spectral_gradient(spec, A[0])
    _, a2y = spectral_gradient(spec, A[1])
    return (a1x + a2y).real
