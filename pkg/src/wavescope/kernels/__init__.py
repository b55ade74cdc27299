"""Hot-kernel dispatch: compiled extension when available, NumPy otherwise.

The backend is chosen once at import time.  Set ``WAVESCOPE_KERNELS`` to
``native`` or ``numpy`` to force a backend (forcing ``native`` raises if the
extension is not built); ``WAVESCOPE_THREADS`` caps the compiled kernels'
OpenMP parallelism (default: hardware concurrency).
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

from . import numpy_backend

try:
    from . import _native
except ImportError:
    _native = None


def worker_count() -> int:
    """Thread cap from WAVESCOPE_THREADS, else hardware concurrency."""
    env = os.environ.get("WAVESCOPE_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _as_c(arr, dtype):
    return np.ascontiguousarray(arr, dtype=dtype)


_FOCUS_CODES = {"naive": 0, "improved": 1, "watanabe": 2}


def _native_namespace():
    def nudft3_forward(kx2, ky2, kz2, coeff, xs, ys, zs):
        return _native.nudft3_forward(
            _as_c(kx2, float), _as_c(ky2, float), _as_c(kz2, float),
            _as_c(coeff, complex),
            _as_c(xs, float), _as_c(ys, float), _as_c(zs, float),
            worker_count(),
        )

    def nudft3_adjoint(kx2, ky2, kz2, vals, xs, ys, zs):
        return _native.nudft3_adjoint(
            _as_c(kx2, float), _as_c(ky2, float), _as_c(kz2, float),
            _as_c(vals, complex),
            _as_c(xs, float), _as_c(ys, float), _as_c(zs, float),
            worker_count(),
        )

    def lattice_forward(px, py, coeff2d):
        return _native.lattice_forward(
            _as_c(px, complex), _as_c(py, complex), _as_c(coeff2d, complex),
            worker_count(),
        )

    def lattice_adjoint(px, py, vals):
        return _native.lattice_adjoint(
            _as_c(px, complex), _as_c(py, complex), _as_c(vals, complex),
            worker_count(),
        )

    def bpa_accumulate(xs, ys, zs, wvals, vx, vy, vz, two_k, kind, order, out):
        _native.bpa_accumulate(
            _as_c(xs, float), _as_c(ys, float), _as_c(zs, float),
            _as_c(wvals, complex),
            _as_c(vx, float), _as_c(vy, float), _as_c(vz, float),
            float(two_k), _FOCUS_CODES[kind], int(order), out,
            worker_count(),
        )

    return SimpleNamespace(
        name="native",
        nudft3_forward=nudft3_forward,
        nudft3_adjoint=nudft3_adjoint,
        lattice_forward=lattice_forward,
        lattice_adjoint=lattice_adjoint,
        bpa_accumulate=bpa_accumulate,
    )


def _numpy_namespace():
    return SimpleNamespace(
        name="numpy",
        nudft3_forward=numpy_backend.nudft3_forward,
        nudft3_adjoint=numpy_backend.nudft3_adjoint,
        lattice_forward=numpy_backend.lattice_forward,
        lattice_adjoint=numpy_backend.lattice_adjoint,
        bpa_accumulate=numpy_backend.bpa_accumulate,
    )


def get_backend(name: str | None = None):
    """Return the kernel namespace for ``name`` (``native``/``numpy``/None=default)."""
    if name in (None, "", "auto"):
        name = "native" if _native is not None else "numpy"
    if name == "native":
        if _native is None:
            raise ImportError("wavescope.kernels._native is not built")
        return _native_namespace()
    if name == "numpy":
        return _numpy_namespace()
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> tuple[str, ...]:
    return ("native", "numpy") if _native is not None else ("numpy",)


_env_choice = os.environ.get("WAVESCOPE_KERNELS", "auto").strip().lower()
_active = get_backend(_env_choice)

BACKEND = _active.name

nudft3_forward = _active.nudft3_forward
nudft3_adjoint = _active.nudft3_adjoint
lattice_forward = _active.lattice_forward
lattice_adjoint = _active.lattice_adjoint
bpa_accumulate = _active.bpa_accumulate
focusing_values = numpy_backend.focusing_values
