"""Curvature, volume elements, priors and arc lengths of Bures metrics.

All curvature derivatives are finite differences of callable metric fields,
so the same code serves the closed-form fields and the purely numerical ones
obtained from :func:`buresmetric.bures.metric_at`.

Sign convention for scalar curvature: positively curved spaces (spheres) get a
*negative* scalar curvature, so that in two dimensions the Gaussian curvature
is ``K = -R / 2``. A 3-sphere of radius ``a`` therefore has ``R = -6 / a^2``.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .bures import bures_distance_commuting, hs_on_roots_metric, metric_at
from .ensemble import EnsembleSpec, reference_g_bb
from .errors import (
    AccuracyError,
    BoundaryError,
    DomainError,
    IntegrabilityError,
    InvariantViolation,
    PreconditionError,
)
from .families import ParamFamily
from .numdiff import gradient, partial

CURVATURE_REL_STEP = 1e-3
ORTHOGONALITY_ATOL = 1e-10
RADIAL_MARGIN = 0.05
POLAR_MARGIN = 0.05


@dataclass(frozen=True)
class MetricField:
    """A metric tensor as a function of chart coordinates.

    ``interior`` holds one ``(lo, hi)`` pair (or ``None``) per coordinate;
    curvature evaluation refuses points outside it. When ``vectorized`` is set,
    ``metric`` also accepts coordinates of shape ``(dim, *batch)`` and returns
    ``(dim, dim, *batch)``.
    """

    dim: int
    metric: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    interior: tuple = ()
    vectorized: bool = False
    diagonal: bool = False

    def __call__(self, point) -> np.ndarray:
        return np.asarray(self.metric(np.asarray(point, dtype=float)), dtype=float)

    def check_interior(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float).reshape(-1)
        if p.shape[0] != self.dim:
            raise DomainError(f"{self.label}: expected {self.dim} coordinates, got {p.shape[0]}")
        for i, bounds in enumerate(self.interior):
            if bounds is None:
                continue
            lo, hi = bounds
            if not lo <= p[i] <= hi:
                raise BoundaryError(
                    f"{self.label}: coordinate {i} = {p[i]} outside the interior [{lo}, {hi}]"
                )
        return p


_DISK_INTERIOR = ((RADIAL_MARGIN, 1.0 - RADIAL_MARGIN), None)
_BALL_INTERIOR = ((RADIAL_MARGIN, 1.0 - RADIAL_MARGIN), (POLAR_MARGIN, math.pi - POLAR_MARGIN), None)


def _diag(*components):
    comps = np.broadcast_arrays(*components)
    k = len(comps)
    out = np.zeros((k, k) + comps[0].shape)
    for i, c in enumerate(comps):
        out[i, i] = c
    return out


def real_qubit_field(n: int = 1) -> MetricField:
    """Closed-form metric of the ``n``-fold real-qubit family: ``n diag(1/(4(1-r^2)), r^2/4)``."""

    def g(p):
        r = p[0]
        return n * _diag(0.25 / (1.0 - r**2), 0.25 * r**2)

    return MetricField(2, g, f"real^{n} (closed form)", _DISK_INTERIOR, vectorized=True, diagonal=True)


def complex_qubit_field(n: int = 1) -> MetricField:
    """Closed-form metric ``n diag(1/(4(1-r^2)), r^2/4, r^2 sin^2(theta)/4)``."""

    def g(p):
        r, th = p[0], p[1]
        return n * _diag(0.25 / (1.0 - r**2), 0.25 * r**2, 0.25 * (r * np.sin(th)) ** 2)

    return MetricField(3, g, f"complex^{n} (closed form)", _BALL_INTERIOR, vectorized=True, diagonal=True)


def family_field(family: ParamFamily, diagonal: bool = False) -> MetricField:
    """Numerical metric field of a chart family, evaluated with :func:`metric_at`."""
    interior = _DISK_INTERIOR if family.n_params == 2 else _BALL_INTERIOR
    return MetricField(
        family.n_params,
        lambda p: metric_at(family, p),
        f"{family.label} (numerical)",
        interior,
        diagonal=diagonal,
    )


def flat_polar_field() -> MetricField:
    """Euclidean plane in polar coordinates, ``diag(1, r^2)``."""
    return MetricField(
        2, lambda p: _diag(np.ones_like(p[0]), p[0] ** 2), "flat polar",
        ((1e-3, math.inf), None), vectorized=True, diagonal=True,
    )


def flat_spherical_field() -> MetricField:
    """Euclidean space in spherical coordinates, ``diag(1, r^2, r^2 sin^2(theta))``."""
    return MetricField(
        3,
        lambda p: _diag(np.ones_like(p[0]), p[0] ** 2, (p[0] * np.sin(p[1])) ** 2),
        "flat spherical",
        ((1e-3, math.inf), (POLAR_MARGIN, math.pi - POLAR_MARGIN), None),
        vectorized=True,
        diagonal=True,
    )


def ensemble_g_bb(n: int, beta: float) -> float:
    """``g_bb`` of ``zeta_n``: the closed form for ``2 <= n <= 7``, otherwise the eigenvalue route."""
    if 2 <= n <= 7:
        return reference_g_bb(n, beta)
    return hs_on_roots_metric(EnsembleSpec(n, beta))


def ensemble_field(n: int) -> MetricField:
    """One-dimensional metric field ``g_bb(beta)`` of the ensemble ``zeta_n``."""
    vectorized = 2 <= n <= 7

    def g(p):
        b = np.asarray(p[0], dtype=float)
        val = reference_g_bb(n, b) if vectorized else ensemble_g_bb(n, float(b))
        return np.asarray(val)[None, None]

    return MetricField(1, g, f"zeta_{n}", ((0.0, math.inf),), vectorized=vectorized, diagonal=True)


# -- curvature -----------------------------------------------------------------


def _check_orthogonal(g: np.ndarray, label: str) -> None:
    off = g - np.diag(np.diag(g))
    if np.max(np.abs(off)) > ORTHOGONALITY_ATOL:
        raise PreconditionError(f"{label}: metric is not diagonal (max off-diagonal {np.max(np.abs(off)):.2e})")


def gaussian_curvature_2d(mfield: MetricField, point, rel_step: float = CURVATURE_REL_STEP) -> float:
    """Gaussian curvature of an orthogonal 2D metric ``E du^2 + G dv^2``.

    ``K = -1/(2 sqrt(EG)) [d_v(d_v E / sqrt(EG)) + d_u(d_u G / sqrt(EG))]``,
    with nested Richardson-extrapolated central differences.
    """
    if mfield.dim != 2:
        raise PreconditionError(f"{mfield.label}: expected a 2-parameter field")
    p = mfield.check_interior(point)
    _check_orthogonal(mfield(p), mfield.label)

    def e(x):
        return mfield(x)[0, 0]

    def gg(x):
        return mfield(x)[1, 1]

    def d_v_e_over_root(x):
        return partial(e, x, 1, rel_step) / math.sqrt(e(x) * gg(x))

    def d_u_g_over_root(x):
        return partial(gg, x, 0, rel_step) / math.sqrt(e(x) * gg(x))

    outer = partial(d_v_e_over_root, p, 1, rel_step) + partial(d_u_g_over_root, p, 0, rel_step)
    return float(-outer / (2.0 * math.sqrt(e(p) * gg(p))))


def _christoffel_general(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    # gamma[k, i, j] = 1/2 g^{kl} (d_i g_lj + d_j g_li - d_l g_ij), dg[m, a, b] = d_m g_ab
    ginv = np.linalg.inv(g)
    lower = np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg
    return 0.5 * np.einsum("kl,lij->kij", ginv, lower)


def _christoffel_diagonal(gd: np.ndarray, dgd: np.ndarray) -> np.ndarray:
    # gd[i] = g_ii, dgd[m, i] = d_m g_ii
    k = gd.shape[0]
    gam = np.zeros((k, k, k))
    for i in range(k):
        for j in range(k):
            if i == j:
                gam[i, i, i] = dgd[i, i] / (2 * gd[i])
            else:
                gam[i, i, j] = gam[i, j, i] = dgd[j, i] / (2 * gd[i])
                gam[i, j, j] = -dgd[i, j] / (2 * gd[i])
    return gam


def christoffel_symbols(mfield: MetricField, point, rel_step: float = CURVATURE_REL_STEP,
                        diagonal: bool = False) -> np.ndarray:
    """``Gamma[k, i, j]`` (upper index first) at ``point``."""
    p = np.asarray(point, dtype=float)
    if diagonal:
        gd = np.diag(mfield(p))
        dgd = gradient(lambda x: np.diag(mfield(x)), p, rel_step)
        return _christoffel_diagonal(gd, dgd)
    return _christoffel_general(mfield(p), gradient(mfield, p, rel_step))


def _scalar_from_christoffel(mfield: MetricField, p: np.ndarray, rel_step: float, diagonal: bool) -> float:
    gam = christoffel_symbols(mfield, p, rel_step, diagonal)
    # dgam[m, r, n, s] = d_m Gamma^r_{ns}
    dgam = gradient(lambda x: christoffel_symbols(mfield, x, rel_step, diagonal), p, rel_step)
    riem = (
        np.einsum("mrns->rsmn", dgam)
        - np.einsum("nrms->rsmn", dgam)
        + np.einsum("rml,lns->rsmn", gam, gam)
        - np.einsum("rnl,lms->rsmn", gam, gam)
    )
    ricci = np.einsum("rsrn->sn", riem)
    standard = float(np.einsum("sn,sn->", np.linalg.inv(mfield(p)), ricci))
    return -standard


def scalar_curvature(mfield: MetricField, point, rel_step: float = CURVATURE_REL_STEP) -> float:
    """Ricci scalar of any metric field from finite-difference Christoffel symbols.

    Uses the sign convention of the module docstring (spheres negative).
    """
    p = mfield.check_interior(point)
    return _scalar_from_christoffel(mfield, p, rel_step, diagonal=False)


def scalar_curvature_diag3(mfield: MetricField, point, rel_step: float = CURVATURE_REL_STEP) -> float:
    """Ricci scalar of a diagonal three-parameter metric.

    Christoffel symbols are assembled from the derivatives of the three
    diagonal components only.
    """
    if mfield.dim != 3:
        raise PreconditionError(f"{mfield.label}: expected a 3-parameter field")
    p = mfield.check_interior(point)
    _check_orthogonal(mfield(p), mfield.label)
    return _scalar_from_christoffel(mfield, p, rel_step, diagonal=True)


# -- volume elements and priors ------------------------------------------------


def volume_element(mfield: MetricField, point) -> float:
    """``sqrt(det g)`` at ``point``."""
    g = mfield(point)
    det = float(np.linalg.det(g)) if g.ndim == 2 else float(g)
    scale = float(np.prod(np.abs(np.diag(g)))) if g.ndim == 2 else abs(det)
    if det < -1e-12 * max(scale, 1e-300):
        raise AccuracyError(f"{mfield.label}: negative metric determinant {det:.3e}")
    return math.sqrt(max(det, 0.0))


def _volume_elements(mfield: MetricField, coords: np.ndarray) -> np.ndarray:
    """``sqrt(det g)`` at many points; ``coords`` has shape ``(dim, m)``."""
    if mfield.vectorized:
        g = np.asarray(mfield.metric(coords), dtype=float)
        det = np.linalg.det(np.moveaxis(g, (0, 1), (-2, -1)))
        return np.sqrt(np.clip(det, 0.0, None))
    return np.array([volume_element(mfield, coords[:, k]) for k in range(coords.shape[1])])


@dataclass(frozen=True)
class DomainSpec:
    """Integration domain of a chart: ``"disk"`` (r, theta), ``"ball"`` (r, theta, phi), ``"half-line"`` (beta)."""

    kind: str

    def __post_init__(self):
        if self.kind not in ("disk", "ball", "half-line"):
            raise ValueError(f"unknown domain {self.kind!r}")

    @property
    def dim(self) -> int:
        return {"disk": 2, "ball": 3, "half-line": 1}[self.kind]


DISK = DomainSpec("disk")
BALL = DomainSpec("ball")
HALF_LINE = DomainSpec("half-line")


@dataclass(frozen=True)
class PriorDensity:
    """Normalized volume element ``sqrt(det g) / normalization`` on ``domain``."""

    domain: DomainSpec
    normalization: float
    volume: Callable[[np.ndarray], float] = field(repr=False)

    def __call__(self, point) -> float:
        return self.volume(np.asarray(point, dtype=float)) / self.normalization


def _gauss_legendre(order: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _integrate_ball_like(mfield: MetricField, domain: DomainSpec, order: int) -> float:
    # r = sin(psi) absorbs the 1/sqrt(1 - r^2) growth of the Bures volume element
    psi, w_psi = _gauss_legendre(order, 0.0, 0.5 * math.pi)
    axes = [np.sin(psi)]
    weights = [w_psi * np.cos(psi)]
    if domain.kind == "disk":
        th, w_th = _gauss_legendre(order, 0.0, 2 * math.pi)
        axes.append(th)
        weights.append(w_th)
    else:
        th, w_th = _gauss_legendre(order, 0.0, math.pi)
        ph, w_ph = _gauss_legendre(order, 0.0, 2 * math.pi)
        axes += [th, ph]
        weights += [w_th, w_ph]
    grids = np.meshgrid(*axes, indexing="ij")
    wgrid = weights[0]
    for w in weights[1:]:
        wgrid = np.multiply.outer(wgrid, w)
    coords = np.stack([g.ravel() for g in grids])
    return float(np.dot(wgrid.ravel(), _volume_elements(mfield, coords)))


def _integrate_half_line(fn: Callable[[float], float], upper: float = math.inf, lower: float = 0.0) -> float:
    """``int_lower^upper fn(beta) d beta``; QUADPACK warnings become :class:`IntegrabilityError`."""
    # beta = u^2 removes the beta^(-1/2) behaviour at the origin and slows the 1/beta tail
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(lambda u: 2.0 * u * fn(u * u), math.sqrt(lower), math.sqrt(upper),
                            epsabs=1e-13, epsrel=1e-12, limit=500)
        except IntegrationWarning as exc:
            raise IntegrabilityError(f"half-line integral did not converge: {exc}") from exc
    if not np.isfinite(val) or err > 1e-8:
        raise IntegrabilityError(f"half-line integral unreliable (value {val}, error {err:.2e})")
    return val


def integrate_volume(mfield: MetricField, domain: DomainSpec, order: int = 16,
                     max_order: int = 256, rtol: float = 1e-12) -> float:
    """``int sqrt(det g)`` over ``domain``.

    Disk and ball: tensor Gauss-Legendre rule in ``(psi, angles)`` with
    ``r = sin(psi)``, doubling the order until two estimates agree to ``rtol``.
    Half-line: adaptive quadrature after ``beta = u^2``.
    """
    if mfield.dim != domain.dim:
        raise DomainError(f"{mfield.label} has {mfield.dim} coordinates, domain {domain.kind} has {domain.dim}")
    if domain.kind == "half-line":
        return _integrate_half_line(lambda b: volume_element(mfield, [b]))
    prev = _integrate_ball_like(mfield, domain, order)
    while order * 2 <= max_order:
        order *= 2
        cur = _integrate_ball_like(mfield, domain, order)
        if not np.isfinite(cur):
            break
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    raise IntegrabilityError(f"volume of {mfield.label} over the {domain.kind} did not converge")


def normalize_prior(mfield: MetricField, domain: DomainSpec) -> PriorDensity:
    """Turn the volume element of ``mfield`` into a probability density on ``domain``."""
    total = integrate_volume(mfield, domain)
    if not total > 0:
        raise IntegrabilityError(f"{mfield.label}: volume {total} is not positive")
    return PriorDensity(domain, total, lambda p: volume_element(mfield, p))


def length_normalizer(n: int) -> float:
    """``int_0^inf sqrt(g_bb) d beta`` for the ensemble ``zeta_n``, ``2 <= n <= 7``."""
    if not 2 <= n <= 7:
        raise DomainError(f"length normalizers are defined for n = 2..7, got {n!r}")
    return _integrate_half_line(lambda b: math.sqrt(reference_g_bb(n, b)))


def length_normalizers(ns=range(2, 8)) -> dict[int, float]:
    return {n: length_normalizer(n) for n in ns}


# -- lengths versus distances ----------------------------------------------------


def _root_g(n: int):
    if 2 <= n <= 7:
        return lambda b: math.sqrt(reference_g_bb(n, b))
    return lambda b: math.sqrt(hs_on_roots_metric(EnsembleSpec(n, b), beta_step=min(1e-3 * max(1.0, b), 0.5 * b)))


def integrated_length(n: int, beta1: float, beta2: float) -> float:
    """``|int_{beta1}^{beta2} sqrt(g_bb) d beta|`` by adaptive quadrature in ``u = sqrt(beta)``."""
    if not (beta1 > 0 and beta2 > 0):
        raise DomainError(f"beta values must be positive, got {beta1!r}, {beta2!r}")
    if beta1 == beta2:
        return 0.0
    lo, hi = sorted((float(beta1), float(beta2)))
    return _integrate_half_line(_root_g(n), upper=hi, lower=lo)


def cumulative_lengths(n: int, betas, workers: int = 1) -> np.ndarray:
    """``L(beta) = int_0^beta sqrt(g_bb)`` at each of ``betas`` (any order).

    Segments between consecutive sorted values are integrated independently
    (optionally on ``workers`` threads) and summed in a fixed order.
    """
    b = np.asarray(betas, dtype=float)
    if np.any(b <= 0):
        raise DomainError("beta values must be positive")
    uniq = np.unique(b)
    root = _root_g(n)

    def segment(k):
        if k == 0:
            return _integrate_half_line(root, upper=uniq[0])
        return _integrate_half_line(root, upper=uniq[k], lower=uniq[k - 1])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pieces = list(pool.map(segment, range(uniq.size)))
    else:
        pieces = [segment(k) for k in range(uniq.size)]
    cum = np.cumsum(pieces)
    return cum[np.searchsorted(uniq, b)]


EXCESS_ATOL = 1e-9


def length_distance_excess(n: int, beta1: float, beta2: float) -> float:
    """Arc length of the family minus the Bures distance between its endpoints.

    Raises
    ------
    InvariantViolation
        If the excess is below ``-1e-9``: a path can never be shorter than the distance.
    """
    delta = integrated_length(n, beta1, beta2) - bures_distance_commuting(
        EnsembleSpec(n, beta1), EnsembleSpec(n, beta2)
    )
    if delta < -EXCESS_ATOL:
        raise InvariantViolation(f"length below distance at n={n}, ({beta1}, {beta2}): {delta:.3e}")
    return delta
