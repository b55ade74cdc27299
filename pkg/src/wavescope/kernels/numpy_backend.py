"""Pure-NumPy implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable and
the reference the extension is tested against.  The nonuniform transforms
evaluate in chunks to bound temporary memory; the lattice (planar) variants
reduce to BLAS matrix products.
"""

from __future__ import annotations

import numpy as np

# target temporary size for chunked broadcasting, in complex128 elements
_CHUNK_ELEMENTS = 4_000_000


def _chunks(total: int, per: int):
    per = max(1, per)
    for start in range(0, total, per):
        yield start, min(start + per, total)


def nudft3_forward(kx2, ky2, kz2, coeff, xs, ys, zs) -> np.ndarray:
    """out[m] = sum_n coeff[n] exp(-j(kx2[n] x[m] + ky2[n] y[m] + kz2[n] z[m]))."""
    n = kx2.size
    m = xs.size
    out = np.empty(m, dtype=complex)
    for lo, hi in _chunks(m, _CHUNK_ELEMENTS // max(1, n)):
        phase = (
            np.outer(xs[lo:hi], kx2)
            + np.outer(ys[lo:hi], ky2)
            + np.outer(zs[lo:hi], kz2)
        )
        out[lo:hi] = np.exp(-1j * phase) @ coeff
    return out


def nudft3_adjoint(kx2, ky2, kz2, vals, xs, ys, zs) -> np.ndarray:
    """out[n] = sum_m exp(+j(kx2[n] x[m] + ky2[n] y[m] + kz2[n] z[m])) vals[m]."""
    n = kx2.size
    out = np.zeros(n, dtype=complex)
    for lo, hi in _chunks(xs.size, _CHUNK_ELEMENTS // max(1, n)):
        phase = (
            np.outer(xs[lo:hi], kx2)
            + np.outer(ys[lo:hi], ky2)
            + np.outer(zs[lo:hi], kz2)
        )
        out += np.exp(1j * phase).T @ vals[lo:hi]
    return out


def lattice_forward(px, py, coeff2d) -> np.ndarray:
    """out[m] = sum_{j,i} coeff2d[j,i] px[m,i] py[m,j].

    ``px``/``py`` hold the per-point lateral phase factors on a separable
    (k_x, k_y) lattice; the z-plane phase is folded into ``coeff2d``.
    """
    return ((py @ coeff2d) * px).sum(axis=1)


def lattice_adjoint(px, py, vals) -> np.ndarray:
    """C[j,i] = sum_m conj(px[m,i] py[m,j]) vals[m]."""
    return (py.conj() * vals[:, None]).T @ px.conj()


PI_HALF = np.pi / 2.0


def focusing_values(dx, dy, dz, two_k: float, kind: str, order: int = 0) -> np.ndarray:
    """Vectorized focusing-operator kernel F(R, 2k) on displacement arrays.

    ``kind`` is one of ``naive``, ``improved``, ``watanabe``; ``order`` is the
    filter order n in {0, 1, 2} for the improved kind.  The closed forms are
    the reconstruction-branch (R_z < 0) expressions.
    """
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    dz = np.asarray(dz, dtype=float)
    r = np.sqrt(dx * dx + dy * dy + dz * dz)
    phase = np.exp(1j * two_k * r)
    if kind == "naive":
        return phase + np.zeros_like(r)
    if kind == "watanabe":
        return (dz / r) * phase
    if kind != "improved":
        raise ValueError(f"unknown focusing kind {kind!r}")
    if order == 0:
        return PI_HALF * (1j * two_k * dz / r**2 - dz / r**3) * phase
    rho2 = dx * dx + dy * dy
    if order == 1:
        return (
            (1j * PI_HALF)
            * (
                -two_k * two_k * dz * dz / r**3
                + (rho2 - 2.0 * dz * dz) * (1j * two_k / r**4 - 1.0 / r**5)
            )
            * phase
        )
    if order == 2:
        return (
            -PI_HALF
            * (
                -1j * two_k**3 * dz**3 / r**4
                + dz
                * (
                    -3.0 * two_k * two_k * (rho2 - dz * dz) / r**5
                    + (3.0 * rho2 - 2.0 * dz * dz) * (-3j * two_k / r**6 + 3.0 / r**7)
                )
            )
            * phase
        )
    raise ValueError(f"no closed-form improved operator of order {order}")


def bpa_accumulate(xs, ys, zs, wvals, vx, vy, vz, two_k: float,
                   kind: str, order: int, out: np.ndarray) -> None:
    """Accumulate sum_m wvals[m] F(r_v - r_m, 2k) into out[c, b, a].

    Voxel axes ``vx``/``vy``/``vz`` define the image lattice; ``wvals`` is
    the quadrature-weighted observation data for one frequency.
    """
    nvox = vx.size * vy.size * vz.size
    gz, gy, gx = np.meshgrid(vz, vy, vx, indexing="ij")
    for lo, hi in _chunks(xs.size, max(1, _CHUNK_ELEMENTS // max(1, nvox))):
        dx = gx[None, ...] - xs[lo:hi, None, None, None]
        dy = gy[None, ...] - ys[lo:hi, None, None, None]
        dz = gz[None, ...] - zs[lo:hi, None, None, None]
        vals = focusing_values(dx, dy, dz, two_k, kind, order)
        out += np.einsum("m,mzyx->zyx", wvals[lo:hi], vals)
