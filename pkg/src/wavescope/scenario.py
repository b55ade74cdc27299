"""Synthetic imaging scenarios: sampling grids, target point clouds, and
forward-simulated observation data under the first-order Born model.

All randomness goes through a counter-based 64-bit mixing generator
(splitmix64 finalizer) with per-axis substreams, so every generator in this
module is bit-deterministic for a fixed seed on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .core import DomainError, Medium, VACUUM, wavenumber_from_frequency
from .probes import spherical_basis

GRID_KINDS = ("regular", "gauss-legendre")
FORWARD_MODELS = ("isotropic-scalar", "hertzian-dipole")

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer: bijective avalanche mixing of uint64 words."""
    z = (z + np.uint64(0x9E3779B97F4A7C15)) & _MASK64
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK64
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK64
    return z ^ (z >> np.uint64(31))


def counter_uniform(seed: int, stream: int, counters) -> np.ndarray:
    """Deterministic uniforms in [0, 1): value = f(seed, stream, counter).

    ``stream`` separates independent substreams (e.g. one per coordinate
    axis); ``counters`` is an integer array of draw indices.  The top 53
    bits of the mixed word form the mantissa.
    """
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        word = _mix64(_mix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF)) ^ _mix64(
            np.uint64(stream) * np.uint64(0xA24BAED4963EE407) ^ c
        ))
    return (word >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class PointScatterer:
    """Ideal point target with scalar or 2x2 polarimetric reflectivity.

    A 2x2 reflectivity is indexed [receive, transmit] in the spherical
    (theta, phi) components of the monostatic scattering direction.
    """

    position: tuple[float, float, float]
    reflectivity: Union[complex, np.ndarray] = 1.0 + 0.0j

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        if pos.shape != (3,) or not np.all(np.isfinite(pos)):
            raise DomainError("scatterer position must be a finite 3-vector")
        refl = self.reflectivity
        if np.isscalar(refl) or np.asarray(refl).ndim == 0:
            if refl == 0:
                raise DomainError("scatterer reflectivity must be nonzero")
        else:
            dyad = np.asarray(refl, dtype=complex)
            if dyad.shape != (2, 2):
                raise DomainError("dyadic reflectivity must be 2x2")
            if not np.any(dyad):
                raise DomainError("scatterer reflectivity must be nonzero")

    @property
    def is_isotropic(self) -> bool:
        return np.isscalar(self.reflectivity) or np.asarray(self.reflectivity).ndim == 0

    def scalar_amplitude(self) -> complex:
        if not self.is_isotropic:
            raise DomainError("dyadic scatterer has no scalar amplitude")
        return complex(self.reflectivity)


@dataclass(frozen=True)
class ApertureSpec:
    """Planar observation aperture description.

    ``center`` is the lateral (x, y) center, ``plane_z`` the standoff plane.
    ``perturbation`` gives per-axis half-widths of a uniform random position
    jitter applied after grid generation (quadrature weights are kept from
    the unperturbed grid).
    """

    kind: str
    extent: tuple[float, float]
    counts: tuple[int, int]
    plane_z: float
    center: tuple[float, float] = (0.0, 0.0)
    perturbation: tuple[float, float, float] = (0.0, 0.0, 0.0)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in GRID_KINDS:
            raise DomainError(f"unknown grid kind {self.kind!r}")
        if self.extent[0] <= 0.0 or self.extent[1] <= 0.0:
            raise DomainError("aperture extents must be positive")
        if self.counts[0] < 1 or self.counts[1] < 1:
            raise DomainError("aperture counts must be >= 1")
        if any(h < 0.0 for h in self.perturbation):
            raise DomainError("perturbation half-widths must be >= 0")


@dataclass
class ObservationSet:
    """Irregularly sampled transfer observations (the data vector).

    Attributes
    ----------
    positions : ndarray, shape (M, 3)
    weights : ndarray, shape (M,)
        Per-position quadrature weights in m^2.
    frequencies_hz : ndarray, shape (F,)
    probes : list of ProbeCombination, length P
    samples : ndarray, shape (P, F, M), complex
    medium : Medium
    """

    positions: np.ndarray
    weights: np.ndarray
    frequencies_hz: np.ndarray
    probes: list
    samples: np.ndarray
    medium: Medium = field(default_factory=lambda: VACUUM)

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float)
        self.frequencies_hz = np.atleast_1d(np.asarray(self.frequencies_hz, dtype=float))
        self.samples = np.asarray(self.samples, dtype=complex)
        m = self.positions.shape[0]
        expected = (len(self.probes), self.frequencies_hz.size, m)
        if self.samples.shape != expected:
            raise DomainError(
                f"sample tensor shape {self.samples.shape} != {expected} (P, F, M)"
            )
        if self.weights.shape != (m,):
            raise DomainError("one quadrature weight per position is required")
        if np.any(self.weights < 0.0):
            raise DomainError("quadrature weights must be >= 0")
        if not np.all(np.isfinite(self.positions)):
            raise DomainError("observation positions must be finite")

    @property
    def n_points(self) -> int:
        return self.positions.shape[0]

    @property
    def n_probes(self) -> int:
        return len(self.probes)

    def plane_z(self) -> tuple[float, float]:
        """(mean z, max |z - mean z|) of the observation points."""
        z = self.positions[:, 2]
        zbar = float(z.mean())
        return zbar, float(np.max(np.abs(z - zbar)))

    def wavenumbers(self) -> np.ndarray:
        return np.array(
            [wavenumber_from_frequency(f, self.medium) for f in self.frequencies_hz]
        )


@dataclass(frozen=True)
class Scenario:
    """Declarative description of a synthetic imaging experiment."""

    targets: tuple
    aperture: ApertureSpec
    probes: tuple
    frequencies_hz: tuple
    forward_model: str = "isotropic-scalar"
    near_field_terms: bool = True
    medium: Medium = VACUUM
    seed: int = 0
    name: str = ""
    notes: str = ""

    def __post_init__(self):
        if len(self.targets) == 0:
            raise DomainError("scenario requires at least one target")
        if len(self.frequencies_hz) == 0:
            raise DomainError("scenario requires at least one frequency")
        if len(self.probes) == 0:
            raise DomainError("scenario requires at least one probe combination")
        if self.forward_model not in FORWARD_MODELS:
            raise DomainError(f"unknown forward model {self.forward_model!r}")


def make_regular_grid(spec: ApertureSpec):
    """Equispaced points spanning the aperture extents, uniform weights.

    Points run from edge to edge inclusive (spacing L/(M-1) per axis, a
    single point sits at the center), with weights L_x*L_y/(M_x*M_y).

    Returns
    -------
    positions : ndarray (M, 3)
    weights : ndarray (M,)
    """
    if spec.kind != "regular":
        raise DomainError(f"grid kind is {spec.kind!r}, expected 'regular'")
    mx, my = spec.counts
    lx, ly = spec.extent

    def axis(center, extent, count):
        if count == 1:
            return np.array([center])
        return center - extent / 2.0 + np.arange(count) * (extent / (count - 1))

    xs = axis(spec.center[0], lx, mx)
    ys = axis(spec.center[1], ly, my)
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    positions = np.column_stack(
        [gx.ravel(), gy.ravel(), np.full(mx * my, spec.plane_z)]
    )
    weights = np.full(mx * my, lx * ly / (mx * my))
    return positions, weights


def make_gauss_legendre_grid(spec: ApertureSpec):
    """Tensor-product Gauss-Legendre nodes and weights over the aperture.

    The per-axis rule of order n integrates polynomials up to degree
    2n - 1 exactly; the tensor weights sum to the aperture area.
    """
    if spec.kind != "gauss-legendre":
        raise DomainError(f"grid kind is {spec.kind!r}, expected 'gauss-legendre'")
    mx, my = spec.counts
    lx, ly = spec.extent
    nx, wx = np.polynomial.legendre.leggauss(mx)
    ny, wy = np.polynomial.legendre.leggauss(my)
    xs = spec.center[0] + 0.5 * lx * nx
    ys = spec.center[1] + 0.5 * ly * ny
    wx = 0.5 * lx * wx
    wy = 0.5 * ly * wy
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    positions = np.column_stack(
        [gx.ravel(), gy.ravel(), np.full(mx * my, spec.plane_z)]
    )
    weights = np.outer(wy, wx).ravel()
    return positions, weights


def perturb_grid(positions: np.ndarray, half_widths, seed: int) -> np.ndarray:
    """Shift each coordinate by an independent uniform draw in [-h, +h].

    Positions are not reordered; the draw for point i on axis a depends only
    on (seed, a, i), so subsets perturb identically to their supersets.
    """
    half_widths = np.asarray(half_widths, dtype=float)
    if np.any(half_widths < 0.0):
        raise DomainError("perturbation half-widths must be >= 0")
    positions = np.array(positions, dtype=float, copy=True)
    m = positions.shape[0]
    idx = np.arange(m)
    for axis in range(3):
        h = half_widths[axis]
        if h == 0.0:
            continue
        u = counter_uniform(seed, stream=axis, counters=idx)
        positions[:, axis] += h * (2.0 * u - 1.0)
    return positions


def aperture_positions_and_weights(spec: ApertureSpec):
    """Grid points and quadrature weights for an aperture, with perturbation.

    The jitter is applied after grid generation; weights remain those of the
    unperturbed rule.
    """
    if spec.kind == "regular":
        positions, weights = make_regular_grid(spec)
    else:
        positions, weights = make_gauss_legendre_grid(spec)
    if any(h > 0.0 for h in spec.perturbation):
        positions = perturb_grid(positions, spec.perturbation, spec.seed)
    return positions, weights


def subsample_observations(obs: ObservationSet, fraction: float, seed: int) -> ObservationSet:
    """Retain floor(fraction * M) points drawn at random without replacement.

    Weights are carried over unchanged; recomputing quadrature weights for
    the thinned set (e.g. by Voronoi decomposition) is the caller's job.
    """
    if not 0.0 < fraction <= 1.0:
        raise DomainError("retention fraction must be in (0, 1]")
    m = obs.n_points
    keep = int(np.floor(fraction * m))
    if keep == 0:
        raise DomainError("subsampling would retain zero points")
    if keep == m:
        idx = np.arange(m)
    else:
        keys = counter_uniform(seed, stream=3, counters=np.arange(m))
        idx = np.sort(np.argsort(keys, kind="stable")[:keep])
    return ObservationSet(
        positions=obs.positions[idx],
        weights=obs.weights[idx],
        frequencies_hz=obs.frequencies_hz,
        probes=list(obs.probes),
        samples=obs.samples[:, :, idx],
        medium=obs.medium,
    )


def airplane_target(scale: float = 1.0) -> list[PointScatterer]:
    """51 isotropic unit scatterers tracing an airplane outline at z = 0.

    The silhouette (nose up, +y) fits a 40 mm x 40 mm box and is bilaterally
    symmetric about the fuselage axis x = 0: an 11-point fuselage, swept main
    wings (10 points a side), a trailing-edge hint (3 a side), tailplanes
    (5 a side), and nose/cockpit outline pairs (2 a side).  ``scale``
    multiplies all coordinates.
    """
    mm = 1e-3 * scale
    pts: list[tuple[float, float]] = []
    # fuselage, nose at +20 mm
    for i in range(11):
        pts.append((0.0, 20.0 - 4.0 * i))
    half: list[tuple[float, float]] = []
    # main wing leading edge, root (2, 2) to tip (20, -5.2)
    for i in range(10):
        x = 2.0 + 2.0 * i
        half.append((x, 2.0 - 0.4 * (x - 2.0)))
    # trailing-edge hint
    for x, y in ((4.0, -2.0), (8.0, -3.6), (12.0, -5.2)):
        half.append((x, y))
    # tailplane, root (2, -16) to tip (10, -19)
    for i in range(5):
        x = 2.0 + 2.0 * i
        half.append((x, -16.0 - 0.375 * (x - 2.0)))
    # nose / cockpit outline
    half.append((1.5, 18.0))
    half.append((1.5, 14.0))
    for x, y in half:
        pts.append((x, y))
        pts.append((-x, y))
    return [PointScatterer(position=(x * mm, y * mm, 0.0)) for x, y in pts]


def dipole_efield(rvec: np.ndarray, k: float, orientation, near_field: bool = True) -> np.ndarray:
    """Closed-form Hertzian-dipole electric field, normalized to its 1/R term.

    ``rvec`` points from the dipole to the evaluation point (..., 3).  The
    returned field is ``exp(-jkR) [ t/R + (3u(u.d)-d)(1/(k^2 R^3) + j/(k R^2)) ]``
    with ``t = d - u(u.d)`` the transverse part; with ``near_field=False``
    only the radiation term ``t exp(-jkR)/R`` is kept.
    """
    rvec = np.asarray(rvec, dtype=float)
    d = np.asarray(orientation, dtype=float)
    r = np.linalg.norm(rvec, axis=-1)
    if np.any(r == 0.0):
        raise DomainError("field evaluation point coincides with the dipole")
    u = rvec / r[..., None]
    ud = u @ d
    transverse = d - u * ud[..., None]
    phase = np.exp(-1j * k * r)
    e = transverse * (phase / r)[..., None]
    if near_field:
        longitudinal = 3.0 * u * ud[..., None] - d
        e = e + longitudinal * (phase * (1.0 / (k * k * r**3) + 1j / (k * r * r)))[..., None]
    return e


def _check_separation(targets, positions):
    tz = max(t.position[2] for t in targets)
    oz = float(np.min(positions[:, 2]))
    if oz - tz <= 0.0:
        raise DomainError(
            f"targets must lie strictly below all observation points "
            f"(max target z {tz} vs min observation z {oz})"
        )


def synthesize_observations(scenario: Scenario) -> ObservationSet:
    """Forward-simulate Born transfer samples for a scenario.

    For the isotropic-scalar model every probe combination receives
    ``sum_s sigma_s exp(-2jkR)/R^2``; the hertzian-dipole model evaluates the
    full closed-form dipole fields of the Tx and Rx probes contracted through
    each target's scattering dyad in the spherical components of the
    monostatic direction.

    Raises
    ------
    DomainError
        If a scatterer coincides with an observation point, or the targets
        are not strictly separated from the observation plane.
    """
    positions, weights = aperture_positions_and_weights(scenario.aperture)
    _check_separation(scenario.targets, positions)
    freqs = np.asarray(scenario.frequencies_hz, dtype=float)
    n_p, n_f, n_m = len(scenario.probes), freqs.size, positions.shape[0]
    samples = np.zeros((n_p, n_f, n_m), dtype=complex)

    target_pos = np.array([t.position for t in scenario.targets])  # (S, 3)
    rvec = target_pos[:, None, :] - positions[None, :, :]  # (S, M, 3) obs -> target
    dist = np.linalg.norm(rvec, axis=-1)
    if np.any(dist == 0.0):
        raise DomainError("a scatterer coincides with an observation point")

    if scenario.forward_model == "isotropic-scalar":
        amps = np.array([t.scalar_amplitude() for t in scenario.targets])
        for fi, f in enumerate(freqs):
            k = wavenumber_from_frequency(f, scenario.medium)
            t_mf = (amps[:, None] * np.exp(-2j * k * dist) / dist**2).sum(axis=0)
            samples[:, fi, :] = t_mf[None, :]
    else:
        u = rvec / dist[..., None]  # scattering direction, target seen from obs
        theta_hat, phi_hat = spherical_basis(u)
        dyads = np.empty((len(scenario.targets), 2, 2), dtype=complex)
        for si, t in enumerate(scenario.targets):
            if t.is_isotropic:
                dyads[si] = t.scalar_amplitude() * np.eye(2)
            else:
                dyads[si] = np.asarray(t.reflectivity, dtype=complex)
        for combo in scenario.probes:
            for pat in (combo.tx, combo.rx):
                if pat.kind != "hertzian-dipole":
                    raise DomainError(
                        "hertzian-dipole forward model requires dipole probes"
                    )
        for fi, f in enumerate(freqs):
            k = wavenumber_from_frequency(f, scenario.medium)
            for pi, combo in enumerate(scenario.probes):
                e_t = dipole_efield(rvec, k, combo.tx.orientation, scenario.near_field_terms)
                e_r = dipole_efield(rvec, k, combo.rx.orientation, scenario.near_field_terms)
                et_th = np.einsum("smc,smc->sm", e_t, theta_hat)
                et_ph = np.einsum("smc,smc->sm", e_t, phi_hat)
                er_th = np.einsum("smc,smc->sm", e_r, theta_hat)
                er_ph = np.einsum("smc,smc->sm", e_r, phi_hat)
                contrib = (
                    er_th * dyads[:, 0, 0, None] * et_th
                    + er_th * dyads[:, 0, 1, None] * et_ph
                    + er_ph * dyads[:, 1, 0, None] * et_th
                    + er_ph * dyads[:, 1, 1, None] * et_ph
                )
                samples[pi, fi, :] = contrib.sum(axis=0)

    return ObservationSet(
        positions=positions,
        weights=weights,
        frequencies_hz=freqs,
        probes=list(scenario.probes),
        samples=samples,
        medium=scenario.medium,
    )
