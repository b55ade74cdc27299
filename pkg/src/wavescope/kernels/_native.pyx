# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: nonuniform spectral transforms, separable lattice
transforms for planar observation sets, and back-projection accumulation.

Semantics match ``wavescope.kernels.numpy_backend`` element for element;
loops parallelize over the output axis with a fixed inner summation order,
so results are bit-reproducible for any thread count.
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport sqrt

cdef extern from "math.h" nogil:
    void sincos(double x, double *s, double *c)

cnp.import_array()

DEF PI_HALF = 1.5707963267948966


def nudft3_forward(double[::1] kx2, double[::1] ky2, double[::1] kz2,
                   complex[::1] coeff,
                   double[::1] xs, double[::1] ys, double[::1] zs,
                   int num_threads):
    """out[m] = sum_n coeff[n] exp(-j(kx2[n] x[m] + ky2[n] y[m] + kz2[n] z[m]))."""
    cdef Py_ssize_t m = xs.shape[0], n = kx2.shape[0]
    out_arr = np.empty(m, dtype=np.complex128)
    cdef complex[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double ph, sp, cp, ar, ai, cr, ci, x, y, z
    for i in prange(m, nogil=True, schedule='static', num_threads=num_threads):
        x = xs[i]; y = ys[i]; z = zs[i]
        ar = 0.0; ai = 0.0
        for j in range(n):
            ph = kx2[j] * x + ky2[j] * y + kz2[j] * z
            sincos(ph, &sp, &cp)
            cr = coeff[j].real; ci = coeff[j].imag
            # (cr + j ci) * (cp - j sp)
            ar = ar + cr * cp + ci * sp
            ai = ai + ci * cp - cr * sp
        out[i].real = ar
        out[i].imag = ai
    return out_arr


def nudft3_adjoint(double[::1] kx2, double[::1] ky2, double[::1] kz2,
                   complex[::1] vals,
                   double[::1] xs, double[::1] ys, double[::1] zs,
                   int num_threads):
    """out[n] = sum_m exp(+j(kx2[n] x[m] + ky2[n] y[m] + kz2[n] z[m])) vals[m]."""
    cdef Py_ssize_t m = xs.shape[0], n = kx2.shape[0]
    out_arr = np.empty(n, dtype=np.complex128)
    cdef complex[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double ph, sp, cp, ar, ai, vr, vi, gx, gy, gz
    for j in prange(n, nogil=True, schedule='static', num_threads=num_threads):
        gx = kx2[j]; gy = ky2[j]; gz = kz2[j]
        ar = 0.0; ai = 0.0
        for i in range(m):
            ph = gx * xs[i] + gy * ys[i] + gz * zs[i]
            sincos(ph, &sp, &cp)
            vr = vals[i].real; vi = vals[i].imag
            # (vr + j vi) * (cp + j sp)
            ar = ar + vr * cp - vi * sp
            ai = ai + vi * cp + vr * sp
        out[j].real = ar
        out[j].imag = ai
    return out_arr


def lattice_forward(complex[:, ::1] px, complex[:, ::1] py,
                    complex[:, ::1] coeff2d, int num_threads):
    """out[m] = sum_{j,i} coeff2d[j,i] px[m,i] py[m,j]."""
    cdef Py_ssize_t m = px.shape[0], nx = px.shape[1], ny = py.shape[1]
    out_arr = np.empty(m, dtype=np.complex128)
    cdef complex[::1] out = out_arr
    cdef Py_ssize_t im, i, j
    cdef double sr, si, tr, ti, pr, pi, ar, ai
    for im in prange(m, nogil=True, schedule='static', num_threads=num_threads):
        ar = 0.0; ai = 0.0
        for j in range(ny):
            sr = 0.0; si = 0.0
            for i in range(nx):
                tr = coeff2d[j, i].real; ti = coeff2d[j, i].imag
                pr = px[im, i].real; pi = px[im, i].imag
                sr = sr + tr * pr - ti * pi
                si = si + tr * pi + ti * pr
            pr = py[im, j].real; pi = py[im, j].imag
            ar = ar + sr * pr - si * pi
            ai = ai + sr * pi + si * pr
        out[im].real = ar
        out[im].imag = ai
    return out_arr


def lattice_adjoint(complex[:, ::1] px, complex[:, ::1] py,
                    complex[::1] vals, int num_threads):
    """C[j,i] = sum_m conj(px[m,i] py[m,j]) vals[m]."""
    cdef Py_ssize_t m = px.shape[0], nx = px.shape[1], ny = py.shape[1]
    out_arr = np.zeros((ny, nx), dtype=np.complex128)
    cdef complex[:, ::1] out = out_arr
    cdef Py_ssize_t im, i, j
    cdef double ar, ai, vr, vi, pr, pi
    for j in prange(ny, nogil=True, schedule='static', num_threads=num_threads):
        for im in range(m):
            vr = vals[im].real; vi = vals[im].imag
            pr = py[im, j].real; pi = -py[im, j].imag
            # a = conj(py) * vals
            ar = vr * pr - vi * pi
            ai = vi * pr + vr * pi
            for i in range(nx):
                pr = px[im, i].real; pi = -px[im, i].imag
                out[j, i].real = out[j, i].real + ar * pr - ai * pi
                out[j, i].imag = out[j, i].imag + ai * pr + ar * pi
    return out_arr


cdef inline void _focus_amp(double dx, double dy, double dz, double r,
                            double tk, int kind, int order,
                            double *amp_r, double *amp_i) nogil:
    """Complex amplitude of the focusing kernel before the exp(+j 2kR) phase."""
    cdef double rho2, inner_r, inner_i, r2, r3
    if kind == 0:  # naive
        amp_r[0] = 1.0; amp_i[0] = 0.0
        return
    if kind == 2:  # watanabe
        amp_r[0] = dz / r; amp_i[0] = 0.0
        return
    r2 = r * r
    r3 = r2 * r
    if order == 0:
        amp_r[0] = -PI_HALF * dz / r3
        amp_i[0] = PI_HALF * tk * dz / r2
        return
    rho2 = dx * dx + dy * dy
    if order == 1:
        inner_r = -tk * tk * dz * dz / r3 - (rho2 - 2.0 * dz * dz) / (r3 * r2)
        inner_i = (rho2 - 2.0 * dz * dz) * tk / (r2 * r2)
        amp_r[0] = -PI_HALF * inner_i
        amp_i[0] = PI_HALF * inner_r
        return
    # order == 2
    inner_r = dz * (-3.0 * tk * tk * (rho2 - dz * dz) / (r3 * r2)
                    + (3.0 * rho2 - 2.0 * dz * dz) * 3.0 / (r3 * r2 * r2))
    inner_i = (-tk * tk * tk * dz * dz * dz / (r2 * r2)
               + dz * (3.0 * rho2 - 2.0 * dz * dz) * (-3.0 * tk) / (r3 * r3))
    amp_r[0] = -PI_HALF * inner_r
    amp_i[0] = -PI_HALF * inner_i


def bpa_accumulate(double[::1] xs, double[::1] ys, double[::1] zs,
                   complex[::1] wvals,
                   double[::1] vx, double[::1] vy, double[::1] vz,
                   double two_k, int kind, int order,
                   complex[:, :, ::1] out, int num_threads):
    """out[c,b,a] += sum_m wvals[m] F(r_v - r_m, 2k); kind 0=naive 1=improved 2=watanabe."""
    cdef Py_ssize_t m = xs.shape[0]
    cdef Py_ssize_t nx = vx.shape[0], ny = vy.shape[0], nz = vz.shape[0]
    cdef Py_ssize_t nvox = nx * ny * nz
    cdef Py_ssize_t v, a, b, c, im
    cdef double dx, dy, dz, r, sp, cp, amp_r, amp_i, fr, fi, wr, wi, ar, ai
    for v in prange(nvox, nogil=True, schedule='static', num_threads=num_threads):
        c = v // (ny * nx)
        b = (v // nx) % ny
        a = v % nx
        ar = 0.0; ai = 0.0
        for im in range(m):
            dx = vx[a] - xs[im]
            dy = vy[b] - ys[im]
            dz = vz[c] - zs[im]
            r = sqrt(dx * dx + dy * dy + dz * dz)
            sincos(two_k * r, &sp, &cp)
            _focus_amp(dx, dy, dz, r, two_k, kind, order, &amp_r, &amp_i)
            # f = amp * (cp + j sp)
            fr = amp_r * cp - amp_i * sp
            fi = amp_i * cp + amp_r * sp
            wr = wvals[im].real; wi = wvals[im].imag
            ar = ar + wr * fr - wi * fi
            ai = ai + wi * fr + wr * fi
        out[c, b, a].real = out[c, b, a].real + ar
        out[c, b, a].imag = out[c, b, a].imag + ai
