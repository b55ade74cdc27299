"""Far-field probe patterns, per-combination spectral weight vectors, and the
probe-correction matrix with a truncated pseudo-inverse.

Weight vectors follow the fixed 4-entry layout
``[Wr_th*Wt_th, Wr_ph*Wt_ph, Wr_ph*Wt_th, Wr_th*Wt_ph]`` where ``th``/``ph``
are the spherical polarization components of the receive (r) and transmit (t)
patterns.  For spectral work the patterns are evaluated at the reversed
direction ``-k_hat`` (the wave traveling from the aperture toward the target).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DomainError, SpectralGrid, WaveVector

PATTERN_KINDS = ("ideal-theta", "ideal-phi", "hertzian-dipole")

#: default relative singular-value cutoff for the probe-matrix pseudo-inverse
DEFAULT_PINV_TOL = 1e-3


def spherical_basis(directions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors (theta_hat, phi_hat) at unit direction(s) ``directions``.

    At the poles (direction parallel to z) the azimuth is fixed to phi = 0,
    so theta_hat = (cos(theta), 0, 0) and phi_hat = (0, 1, 0).
    """
    d = np.asarray(directions, dtype=float)
    ux, uy, uz = d[..., 0], d[..., 1], d[..., 2]
    st = np.hypot(ux, uy)
    safe = st > 1e-300
    cp = np.where(safe, ux / np.where(safe, st, 1.0), 1.0)
    sp = np.where(safe, uy / np.where(safe, st, 1.0), 0.0)
    theta_hat = np.stack([uz * cp, uz * sp, -st], axis=-1)
    phi_hat = np.stack([-sp, cp, np.zeros_like(cp)], axis=-1)
    return theta_hat, phi_hat


@dataclass(frozen=True)
class ProbePattern:
    """A far-field probe pattern.

    ``ideal-theta`` and ``ideal-phi`` are unit-magnitude single-polarization
    patterns.  ``hertzian-dipole`` evaluates the transverse projection of the
    dipole axis, peak magnitude 1, with a null along the axis.
    """

    kind: str
    orientation: Optional[tuple[float, float, float]] = None

    def __post_init__(self):
        if self.kind not in PATTERN_KINDS:
            raise DomainError(f"unknown probe pattern kind {self.kind!r}")
        if self.kind == "hertzian-dipole":
            if self.orientation is None:
                raise DomainError("hertzian-dipole pattern requires an orientation")
            n = float(np.linalg.norm(self.orientation))
            if abs(n - 1.0) > 1e-9:
                raise DomainError(f"dipole orientation must be a unit vector, |d|={n}")

    def evaluate(self, directions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Complex (W_theta, W_phi) at unit direction(s), shape ``(...,)`` each."""
        d = np.asarray(directions, dtype=float)
        shape = d.shape[:-1]
        if self.kind == "ideal-theta":
            return np.ones(shape, complex), np.zeros(shape, complex)
        if self.kind == "ideal-phi":
            return np.zeros(shape, complex), np.ones(shape, complex)
        theta_hat, phi_hat = spherical_basis(d)
        axis = np.asarray(self.orientation, dtype=float)
        w_th = theta_hat @ axis
        w_ph = phi_hat @ axis
        return w_th.astype(complex), w_ph.astype(complex)


def hertzian_dipole_pattern(orientation, direction: WaveVector) -> tuple[complex, complex]:
    """(W_theta, W_phi) of a Hertzian dipole at a propagating direction.

    ``orientation`` must be a unit 3-vector; the direction is taken from the
    wave vector's unit direction.  The pattern is the transverse projection
    of the dipole axis resolved into spherical components, peak magnitude 1.
    """
    axis = np.asarray(orientation, dtype=float)
    if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
        raise DomainError("dipole orientation must be a unit vector")
    pat = ProbePattern("hertzian-dipole", tuple(axis))
    w_th, w_ph = pat.evaluate(direction.unit())
    return complex(w_th), complex(w_ph)


@dataclass(frozen=True)
class ProbeCombination:
    """One Tx/Rx probe pairing with its index within an observation set."""

    tx: ProbePattern
    rx: ProbePattern
    index: int = 0


def weight_vector_from_components(wr_th, wr_ph, wt_th, wt_ph) -> np.ndarray:
    """Stack pattern components into the fixed 4-entry layout (leading axis 4)."""
    return np.stack([wr_th * wt_th, wr_ph * wt_ph, wr_ph * wt_th, wr_th * wt_ph])


def probe_weight_vector(combo: ProbeCombination, direction: WaveVector) -> np.ndarray:
    """4-entry spectral weight vector of a probe combination.

    The patterns are evaluated at ``-k_hat`` for the given wave vector, per
    the argument convention of the spectral transfer operator.
    """
    u = -direction.unit()
    wt_th, wt_ph = combo.tx.evaluate(u)
    wr_th, wr_ph = combo.rx.evaluate(u)
    return weight_vector_from_components(wr_th, wr_ph, wt_th, wt_ph)


def probe_weight_vectors_grid(combos, grid: SpectralGrid) -> np.ndarray:
    """Weight vectors over all retained spectral samples, shape (P, 4, N).

    Directions are the reversed unit wave vectors ``-k_hat`` of the retained
    (propagating) samples.
    """
    kx, ky = grid.retained_kxky()
    kz = grid.retained_kz()
    u = -np.stack([kx, ky, kz], axis=-1) / grid.k
    out = np.empty((len(combos), 4, grid.n_retained), dtype=complex)
    for i, combo in enumerate(combos):
        wt_th, wt_ph = combo.tx.evaluate(u)
        wr_th, wr_ph = combo.rx.evaluate(u)
        out[i] = weight_vector_from_components(wr_th, wr_ph, wt_th, wt_ph)
    return out


def truncated_pinv(mats: np.ndarray, tol: float = DEFAULT_PINV_TOL):
    """Moore-Penrose pseudo-inverse with relative singular-value truncation.

    Parameters
    ----------
    mats : ndarray, shape (..., P, Q)
        Batch of matrices.
    tol : float
        Singular values below ``tol * sigma_max`` (per matrix) are truncated
        to zero.  An all-zero matrix yields an all-zero pseudo-inverse.

    Returns
    -------
    pinv : ndarray, shape (..., Q, P)
    rank : ndarray of int, shape (...)
        Number of retained singular values per matrix.
    """
    mats = np.asarray(mats, dtype=complex)
    u, s, vh = np.linalg.svd(mats, full_matrices=False)
    smax = s[..., :1]
    keep = s > tol * np.where(smax > 0.0, smax, 1.0)
    sinv = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    pinv = np.einsum("...ij,...j,...kj->...ik", vh.conj().swapaxes(-2, -1), sinv, u.conj())
    rank = keep.sum(axis=-1)
    return pinv, rank


def probe_matrix_pseudo_inverse(
    combos, direction: WaveVector, tol: float = DEFAULT_PINV_TOL
) -> np.ndarray:
    """Truncated pseudo-inverse of the stacked P x 4 probe matrix, shape (4, P)."""
    rows = np.stack([probe_weight_vector(c, direction) for c in combos])
    pinv, _ = truncated_pinv(rows, tol=tol)
    return pinv


def probe_pinv_grid(combos, grid: SpectralGrid, tol: float = DEFAULT_PINV_TOL):
    """Per-sample probe pseudo-inverses over retained samples.

    Returns
    -------
    pinv : ndarray, shape (N, 4, P)
    rank : ndarray of int, shape (N,)
    """
    weights = probe_weight_vectors_grid(combos, grid)  # (P, 4, N)
    mats = np.moveaxis(weights, 2, 0)  # (N, P, 4)
    return truncated_pinv(mats, tol=tol)
