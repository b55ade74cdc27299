"""Shared physical and mathematical primitives.

Wave numbers, the longitudinal dispersion relation, spectral and voxel
grids, and the global complex-sample conventions used by every other
module.  All quantities are SI: meters, hertz, rad/m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299792458.0
VACUUM_IMPEDANCE = 376.730313668


class DomainError(ValueError):
    """Raised when an input violates a physical or numerical precondition."""


@dataclass(frozen=True)
class Medium:
    """Homogeneous, lossless background medium.

    Attributes
    ----------
    rel_permittivity : float
        Relative permittivity, > 0 (>= 1 for physical media).
    rel_permeability : float
        Relative permeability, > 0.
    """

    rel_permittivity: float = 1.0
    rel_permeability: float = 1.0

    def __post_init__(self):
        if self.rel_permittivity <= 0.0:
            raise DomainError("relative permittivity must be positive")
        if self.rel_permeability <= 0.0:
            raise DomainError("relative permeability must be positive")

    @property
    def impedance(self) -> float:
        """Wave impedance in ohms, sqrt(mu / eps)."""
        return VACUUM_IMPEDANCE * math.sqrt(
            self.rel_permeability / self.rel_permittivity
        )

    @property
    def refractive_index(self) -> float:
        return math.sqrt(self.rel_permittivity * self.rel_permeability)


VACUUM = Medium()


@dataclass(frozen=True)
class ComplexSampleConvention:
    """Global sign conventions, serialized into every output file header.

    The time dependence is exp(+j omega t) and forward propagation
    carries exp(-j k.r).  Both are fixed for the whole artifact.
    """

    time_sign: str = "+jwt"
    propagation_sign: str = "-jkr"

    def as_dict(self) -> dict:
        return {"time_sign": self.time_sign, "propagation_sign": self.propagation_sign}


CONVENTION = ComplexSampleConvention()


def wavenumber_from_frequency(frequency_hz: float, medium: Medium = VACUUM) -> float:
    """Wavenumber k = 2 pi f sqrt(eps mu) in rad/m.

    Parameters
    ----------
    frequency_hz : float
        Frequency in Hz, must be positive.
    medium : Medium
        Background medium (vacuum by default).

    Raises
    ------
    DomainError
        If ``frequency_hz`` is not positive.
    """
    if frequency_hz <= 0.0:
        raise DomainError(f"frequency must be positive, got {frequency_hz}")
    return 2.0 * math.pi * frequency_hz * medium.refractive_index / SPEED_OF_LIGHT


def wavelength_from_frequency(frequency_hz: float, medium: Medium = VACUUM) -> float:
    """Wavelength lambda = 2 pi / k in meters."""
    return 2.0 * math.pi / wavenumber_from_frequency(frequency_hz, medium)


def kz_dispersion(kx, ky, k: float):
    """Longitudinal wavenumber k_z for lateral components (k_x, k_y).

    Returns ``+sqrt(k^2 - k_x^2 - k_y^2)`` in the propagating region,
    ``-j sqrt(k_x^2 + k_y^2 - k^2)`` in the evanescent region, and 0 on
    the boundary circle.  Accepts scalars or arrays.

    Parameters
    ----------
    kx, ky : float or ndarray
        Lateral wavenumber components, rad/m.
    k : float
        Total wavenumber, rad/m, must be positive.

    Returns
    -------
    complex or ndarray of complex
    """
    if k <= 0.0:
        raise DomainError("total wavenumber must be positive")
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    arg = k * k - kx * kx - ky * ky
    out = np.where(
        arg >= 0.0,
        np.sqrt(np.maximum(arg, 0.0)) + 0.0j,
        -1j * np.sqrt(np.maximum(-arg, 0.0)),
    )
    if out.ndim == 0:
        return complex(out)
    return out


@dataclass(frozen=True)
class WaveVector:
    """A single plane-wave direction with k_z fixed by the dispersion branch."""

    kx: float
    ky: float
    k: float
    kz: complex = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "kz", kz_dispersion(self.kx, self.ky, self.k))

    @property
    def is_propagating(self) -> bool:
        return self.kz.imag == 0.0

    def unit(self) -> np.ndarray:
        """Unit direction vector; only meaningful for propagating waves."""
        if not self.is_propagating:
            raise DomainError("evanescent wave vector has no real direction")
        return np.array([self.kx, self.ky, self.kz.real]) / self.k


@dataclass(frozen=True)
class SpectralGrid:
    """Regular Cartesian lattice in (k_x, k_y) restricted to the visible disk.

    Lateral samples are ``kx_axis[i] = (i - (nx-1)/2) * dkx`` (analogous in
    y); the retained subset satisfies ``k_x^2 + k_y^2 <= (eta_cut k)^2`` so
    every retained sample is strictly propagating.  Retained samples are
    listed in row-major (iy, ix) order by flat index ``iy * nx + ix``.

    The spacing rule is ``dk = pi / L'`` with L' twice the larger of the
    observation-aperture and imaging-domain lateral extents, which makes
    the synthesized image alias-free over L'.
    """

    nx: int
    ny: int
    dkx: float
    dky: float
    k: float
    eta_cut: float
    retained: np.ndarray  # flat indices into the nx*ny lattice, int64

    @property
    def kx_axis(self) -> np.ndarray:
        return (np.arange(self.nx) - (self.nx - 1) / 2.0) * self.dkx

    @property
    def ky_axis(self) -> np.ndarray:
        return (np.arange(self.ny) - (self.ny - 1) / 2.0) * self.dky

    @property
    def n_retained(self) -> int:
        return int(self.retained.size)

    def retained_kxky(self) -> tuple[np.ndarray, np.ndarray]:
        """(k_x, k_y) arrays of the retained samples."""
        iy, ix = np.divmod(self.retained, self.nx)
        return self.kx_axis[ix], self.ky_axis[iy]

    def retained_kz(self) -> np.ndarray:
        """Real k_z of the retained (propagating) samples."""
        kx, ky = self.retained_kxky()
        kz = kz_dispersion(kx, ky, self.k)
        return kz.real.copy()

    def cell_area(self) -> float:
        """Spectral cell measure dkx * dky used in quadrature sums."""
        return self.dkx * self.dky

    def same_lattice(self, other: "SpectralGrid") -> bool:
        return (
            self.nx == other.nx
            and self.ny == other.ny
            and math.isclose(self.dkx, other.dkx, rel_tol=1e-12)
            and math.isclose(self.dky, other.dky, rel_tol=1e-12)
        )


@dataclass(frozen=True)
class VoxelGrid:
    """Axis-aligned voxel lattice for image synthesis.

    ``origin`` is the position of voxel (0, 0, 0); ``counts`` and
    ``spacing`` are per axis (x, y, z).
    """

    origin: tuple[float, float, float]
    counts: tuple[int, int, int]
    spacing: tuple[float, float, float]

    def __post_init__(self):
        if any(c < 1 for c in self.counts):
            raise DomainError("voxel counts must be >= 1")
        if any(s <= 0.0 for s in self.spacing):
            raise DomainError("voxel spacings must be positive")

    @property
    def n_voxels(self) -> int:
        return self.counts[0] * self.counts[1] * self.counts[2]

    def axis(self, dim: int) -> np.ndarray:
        """Voxel-center coordinates along dimension 0=x, 1=y, 2=z."""
        return self.origin[dim] + np.arange(self.counts[dim]) * self.spacing[dim]

    @classmethod
    def centered_plane(cls, center, extents, counts_xy, z: float = 0.0) -> "VoxelGrid":
        """Single-plane grid of ``counts_xy`` voxels covering ``extents`` about ``center``.

        The lattice is anchored so that ``center`` falls exactly on voxel
        (nx//2, ny//2); a point target placed at the grid center then has
        an unambiguous peak voxel.
        """
        nx, ny = counts_xy
        lx, ly = extents
        dx, dy = lx / nx, ly / ny
        origin = (center[0] - (nx // 2) * dx, center[1] - (ny // 2) * dy, z)
        return cls(origin=origin, counts=(nx, ny, 1), spacing=(dx, dy, 1.0))
