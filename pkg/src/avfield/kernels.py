"""Smeared Coulomb kernel family, trap potentials, and scaling utilities.

The basic object is the 2D log potential of a unit charge smeared
uniformly over a disc of radius R.  Newton's theorem gives the closed
forms

    w_R(x)      = log|x|                       for |x| >= R,
                  log R + (|x|^2/R^2 - 1)/2    for |x| <  R,
    grad w_R(x) = x/|x|^2                      for |x| >= R,
                  x/R^2                        for |x| <  R,

with w_0 = log|.| for the point-like case.  The gradient is bounded by
1/R for R > 0 and its L^p norms (p > 2) are explicit, which is what
makes the extended model tractable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, DomainError
from .grid import GridSpec, kernel_fft


@dataclass(frozen=True)
class SmearedCoulomb:
    """Smearing radius R >= 0; R = 0 selects the point-like log kernel."""

    R: float

    def __post_init__(self):
        if self.R < 0:
            raise DomainError(f"smearing radius must be >= 0, got {self.R}")

    def w(self, x) -> np.ndarray:
        """Potential value at points x of shape (..., 2)."""
        x = np.asarray(x, dtype=float)
        r = np.hypot(x[..., 0], x[..., 1])
        return self.w_radial(r)

    def w_radial(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.R == 0.0:
            if np.any(r == 0.0):
                raise DomainError("w_0 is singular at the origin")
            return np.log(r)
        out = np.empty_like(r)
        inside = r < self.R
        with np.errstate(divide="ignore"):
            out[~inside] = np.log(r[~inside])
        out[inside] = np.log(self.R) + 0.5 * ((r[inside] / self.R) ** 2 - 1.0)
        return out

    def grad_w(self, x) -> np.ndarray:
        """Gradient at points x of shape (..., 2); odd, with grad_w(0) = 0.

        For R = 0 the origin sample is 0 by the symmetric principal-value
        convention for the odd kernel.
        """
        x = np.asarray(x, dtype=float)
        r2 = x[..., 0] ** 2 + x[..., 1] ** 2
        denom = np.where(r2 == 0.0, 1.0, r2)
        if self.R > 0.0:
            denom = np.maximum(denom, self.R**2)
        out = x / denom[..., np.newaxis]
        out[r2 == 0.0] = 0.0
        return out


def lp_norm_grad_w(R: float, p: float) -> float:
    """Exact ||grad w_R||_{L^p(R^2)} for p > 2, R > 0.

    Radial integration of the piecewise closed form gives

        ||grad w_R||_p^p = 2 pi R^{2-p} ( 1/(p+2) + 1/(p-2) ).
    """
    if p <= 2:
        raise DomainError(f"the L^p norm of grad w_R is infinite for p <= 2, got p={p}")
    if R <= 0:
        raise DomainError(f"need R > 0, got R={R}")
    c = 2.0 * np.pi * (1.0 / (p + 2.0) + 1.0 / (p - 2.0))
    return float(c ** (1.0 / p) * R ** (2.0 / p - 1.0))


def eta0(s: float) -> float:
    """Largest admissible shrink exponent for the smearing radius, (1/4)(1 + 1/s)^-1."""
    if s <= 0:
        raise DomainError(f"trap exponent must be positive, got s={s}")
    return 0.25 / (1.0 + 1.0 / s)


def alpha_of(beta: float, N: int) -> float:
    """Per-pair coupling beta/(N-1)."""
    if N < 2:
        raise DomainError(f"need at least two particles, got N={N}")
    return beta / (N - 1)


@dataclass(frozen=True)
class TrapPotential:
    """Power-law trap V(x) = c |x|^s with c > 0, s > 0."""

    c: float = 1.0
    s: float = 2.0

    def __post_init__(self):
        if self.c <= 0 or self.s <= 0:
            raise DomainError(f"trap requires c > 0 and s > 0, got c={self.c}, s={self.s}")

    def values(self, spec: GridSpec) -> np.ndarray:
        x, y = spec.meshgrid()
        r = np.hypot(x, y)
        return self.c * r**self.s


HARMONIC = TrapPotential(c=1.0, s=2.0)


@dataclass
class KernelSet:
    """Padded-grid samples of w_R, grad w_R, |grad w_R|^2, plus their FFTs.

    ``grad_w_sq`` is None for R = 0: |grad w_0|^2 is not locally
    integrable and the singular two-body term is only offered for R > 0.
    The origin sample of ``w`` at R = 0 is log(h/2), a documented
    convention used only in diagnostics, never in the energy.
    """

    R: float
    w: np.ndarray
    grad_w: np.ndarray
    grad_w_sq: np.ndarray | None
    grad_w_fft: tuple[np.ndarray, np.ndarray]
    grad_w_sq_fft: np.ndarray | None


def sample_kernels(spec: GridSpec, R: float) -> KernelSet:
    """Sample the kernel family on the 2n x 2n padded grid."""
    if R < 0:
        raise DomainError(f"smearing radius must be >= 0, got R={R}")
    a = spec.padded_axis()
    x, y = np.meshgrid(a, a, indexing="xy")
    pts = np.stack([x, y], axis=-1)
    kern = SmearedCoulomb(R)

    r = np.hypot(x, y)
    origin = r == 0.0
    if R == 0.0:
        w = np.empty_like(r)
        with np.errstate(divide="ignore"):
            w[~origin] = np.log(r[~origin])
        w[origin] = np.log(spec.h / 2.0)
    else:
        w = kern.w_radial(r)

    g = kern.grad_w(pts)
    grad_w = np.stack([g[..., 0], g[..., 1]], axis=0)

    if R > 0.0:
        grad_w_sq = grad_w[0] ** 2 + grad_w[1] ** 2
        grad_w_sq_fft = kernel_fft(spec, grad_w_sq)
    else:
        grad_w_sq = None
        grad_w_sq_fft = None

    grad_w_fft = (kernel_fft(spec, grad_w[0]), kernel_fft(spec, grad_w[1]))
    return KernelSet(
        R=R,
        w=w,
        grad_w=grad_w,
        grad_w_sq=grad_w_sq,
        grad_w_fft=grad_w_fft,
        grad_w_sq_fft=grad_w_sq_fft,
    )


@lru_cache(maxsize=16)
def _cached_kernels(spec: GridSpec, R: float) -> KernelSet:
    return sample_kernels(spec, R)


def kernels_for(spec: GridSpec, R: float) -> KernelSet:
    """Memoized ``sample_kernels``; KernelSets are immutable by convention."""
    return _cached_kernels(spec, float(R))
