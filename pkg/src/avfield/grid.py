"""Square computational box with quadrature and spectral services.

The domain is [-L, L)^2 sampled on an n x n grid (n a power of two),
spacing h = 2L/n.  Fields are numpy arrays of shape (n, n) indexed
[iy, ix], i.e. row-major with x fastest.  Derivatives use the periodic
Fourier basis; this is a surrogate for the full plane, justified when
the field decays below round-off at the boundary (the trap enforces
this for the states we care about).  Convolutions are zero-padded to
2n per axis, so they are linear (no wrap-around) inside the primary
box; the kernel tail beyond the padded box is truncated, an O(1/L)
error controlled by the box size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """n points per axis on the square [-L, L)^2."""

    n: int
    half_width: float
    pad_factor: int = 2

    def __post_init__(self):
        if self.n < 16 or not _is_power_of_two(self.n):
            raise ConfigurationError(f"grid size must be a power of two >= 16, got {self.n}")
        if self.half_width <= 0:
            raise ConfigurationError(f"half_width must be positive, got {self.half_width}")
        if self.pad_factor != 2:
            raise ConfigurationError("only pad_factor=2 is supported")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.n

    def axis(self) -> np.ndarray:
        """1D coordinates -L, -L+h, ..., L-h."""
        return -self.half_width + self.h * np.arange(self.n)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """(x, y) coordinate arrays of shape (n, n), [iy, ix] layout."""
        a = self.axis()
        x, y = np.meshgrid(a, a, indexing="xy")
        return x, y

    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        """Spectral wavenumbers (kx, ky) for differentiation.

        The Nyquist mode is zeroed so that derivatives of real fields
        stay real.
        """
        k = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.h)
        k[self.n // 2] = 0.0
        kx = k[np.newaxis, :]
        ky = k[:, np.newaxis]
        return kx, ky

    def padded_axis(self) -> np.ndarray:
        """Offsets m*h, m = -n..n-1, for kernel sampling on the padded grid."""
        return self.h * (np.arange(2 * self.n) - self.n)


def integrate(spec: GridSpec, f: np.ndarray):
    """Discrete integral h^2 * sum(f)."""
    return f.sum() * spec.h**2


def inner(spec: GridSpec, f: np.ndarray, g: np.ndarray):
    """Discrete L^2 inner product <f, g> = h^2 sum conj(f) g."""
    return np.vdot(f, g) * spec.h**2


def l2_norm(spec: GridSpec, f: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(f) ** 2) * spec.h**2))


def spectral_gradient(spec: GridSpec, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(d/dx f, d/dy f) via Fourier multiplication by ik."""
    kx, ky = spec.wavenumbers()
    fh = np.fft.fft2(f)
    fx = np.fft.ifft2(1j * kx * fh)
    fy = np.fft.ifft2(1j * ky * fh)
    return fx, fy


def spectral_laplacian(spec: GridSpec, f: np.ndarray) -> np.ndarray:
    kx, ky = spec.wavenumbers()
    fh = np.fft.fft2(f)
    return np.fft.ifft2(-(kx**2 + ky**2) * fh)


def kernel_fft(spec: GridSpec, kernel: np.ndarray) -> np.ndarray:
    """Precompute the padded-grid FFT of a centered kernel sample.

    The kernel must be sampled on the 2n x 2n offsets returned by
    ``padded_axis`` (origin at index n along each axis).
    """
    m = spec.pad_factor * spec.n
    if kernel.shape != (m, m):
        raise ConfigurationError(
            f"kernel shape {kernel.shape} does not match padded grid ({m}, {m})"
        )
    return np.fft.rfft2(np.fft.ifftshift(kernel))


def convolve(spec: GridSpec, f: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Linear convolution h^2 * (kernel * f) restricted to the primary box.

    ``kernel`` is either the centered 2n x 2n sample array or its
    precomputed rfft2 (as returned by ``kernel_fft``).
    """
    n = spec.n
    m = spec.pad_factor * n
    if kernel.shape == (m, m):
        kh = kernel_fft(spec, kernel)
    elif kernel.shape == (m, m // 2 + 1):
        kh = kernel
    else:
        raise ConfigurationError(
            f"kernel shape {kernel.shape} does not match padded grid ({m}, {m})"
        )
    fp = np.zeros((m, m), dtype=float)
    fp[:n, :n] = f
    out = np.fft.irfft2(np.fft.rfft2(fp) * kh, s=(m, m))
    return out[:n, :n] * spec.h**2


@dataclass
class WaveFunction:
    """Complex scalar field with its cached discrete L^2 mass."""

    grid: GridSpec
    values: np.ndarray
    l2_norm: float = field(init=False)

    def __post_init__(self):
        if self.values.shape != (self.grid.n, self.grid.n):
            raise ConfigurationError(
                f"field shape {self.values.shape} does not match grid n={self.grid.n}"
            )
        self.values = np.asarray(self.values, dtype=complex)
        self.l2_norm = float(np.sum(np.abs(self.values) ** 2) * self.grid.h**2)

    def normalized(self) -> "WaveFunction":
        if self.l2_norm == 0.0:
            raise ConfigurationError("cannot normalize the zero field")
        return WaveFunction(self.grid, self.values / np.sqrt(self.l2_norm))

    def boundary_mass(self) -> float:
        """Largest density sample on the outermost grid ring (decay check)."""
        rho = np.abs(self.values) ** 2
        edge = np.concatenate([rho[0, :], rho[-1, :], rho[:, 0], rho[:, -1]])
        return float(edge.max())


def gaussian_state(spec: GridSpec, width: float = 1.0, vortex: bool = False) -> WaveFunction:
    """Normalized Gaussian exp(-|x|^2 / (2 width^2)), optionally with a unit vortex."""
    x, y = spec.meshgrid()
    vals = np.exp(-(x**2 + y**2) / (2.0 * width**2)).astype(complex)
    if vortex:
        vals = (x + 1j * y) * vals
    return WaveFunction(spec, vals).normalized()
