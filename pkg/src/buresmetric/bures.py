"""Bures metric and distance.

* :func:`metric_at` pulls the Bures metric back to a chart through the
  eigenbasis formula ``ds^2 = sum_ij |<i|d rho|j>|^2 / (2 (lambda_i + lambda_j))``.
* :func:`bures_distance` is the finite distance ``sqrt(2 - 2 tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))``.
* For the commuting ensembles ``zeta_n(beta)`` the distance and the metric
  only need the eigenvalue branches, so they work for ``n = 100`` and beyond.
"""

from __future__ import annotations

import math

import numpy as np

from .ensemble import EnsembleSpec, log_eigenvalues, log_multiplicities
from .errors import AccuracyError, BoundaryError, DomainError, RankDeficiencyError, ShapeError
from .families import ParamFamily
from .linalg import as_density, eigh, sqrtm_psd
from .numdiff import second_central

MIN_EIGENVALUE = 1e-8
SMALL_DENOMINATOR = 1e-12
SMALL_NUMERATOR = 1e-14
MAX_DISTANCE = math.sqrt(2.0)


def metric_at(family: ParamFamily, point, min_eigenvalue: float = MIN_EIGENVALUE) -> np.ndarray:
    """Bures metric tensor of ``family`` at ``point`` in chart coordinates.

    Components are the symmetric bilinear form
    ``g_ab = sum_ij Re(<i|d_a rho|j> <j|d_b rho|i>) / (2 (lambda_i + lambda_j))``
    over the full double sum of eigenvector pairs.

    Raises
    ------
    BoundaryError
        If ``rho(point)`` has an eigenvalue at or below ``min_eigenvalue``.
    RankDeficiencyError
        If a pair with ``lambda_i + lambda_j < 1e-12`` carries a non-negligible
        derivative component (only reachable with ``min_eigenvalue`` lowered).
    """
    spec = eigh(family.evaluate(point))
    lam = spec.eigenvalues
    if lam[0] <= min_eigenvalue:
        raise BoundaryError(
            f"{family.label} at {np.asarray(point).tolist()} is at the boundary "
            f"(min eigenvalue {lam[0]:.3e} <= {min_eigenvalue:.1e})"
        )
    v = spec.eigenvectors
    vh = v.conj().T
    comps = np.stack([vh @ d @ v for d in family.derivatives(point)])

    denom = lam[:, None] + lam[None, :]
    small = denom < SMALL_DENOMINATOR
    if np.any(small):
        if np.any(np.abs(comps[:, small]) ** 2 >= SMALL_NUMERATOR):
            raise RankDeficiencyError(
                f"{family.label} at {np.asarray(point).tolist()}: derivative leaves the support"
            )
        denom = np.where(small, np.inf, denom)

    scaled = comps / (2.0 * denom)
    g = np.einsum("aij,bij->ab", scaled, comps.conj()).real
    return 0.5 * (g + g.T)


def root_fidelity(rho1, rho2) -> float:
    """``tr sqrt(sqrt(rho1) rho2 sqrt(rho1))``, i.e. the trace norm of ``sqrt(rho1) sqrt(rho2)``."""
    a = sqrtm_psd(rho1)
    b = sqrtm_psd(rho2)
    return float(np.sum(np.linalg.svd(a @ b, compute_uv=False)))


def fidelity(rho1, rho2) -> float:
    return root_fidelity(rho1, rho2) ** 2


def bures_distance(rho1, rho2) -> float:
    """Bures distance between two density matrices of equal dimension."""
    r1 = np.asarray(rho1)
    r2 = np.asarray(rho2)
    if r1.shape != r2.shape:
        raise ShapeError(f"dimension mismatch: {r1.shape} vs {r2.shape}")
    r1 = as_density(r1)
    r2 = as_density(r2)
    # the actual traces instead of 2 keep last-bit trace error out of the cancellation
    sq = np.trace(r1).real + np.trace(r2).real - 2.0 * root_fidelity(r1, r2)
    return float(np.sqrt(min(max(sq, 0.0), 2.0)))


def _commuting_distance_sq(log_m, ll1, ll2):
    # d^2 = sum_q m_q (sqrt(l1) - sqrt(l2))^2, equal to 2 - 2 sum m sqrt(l1 l2) when
    # both traces are one, but without the cancellation near the diagonal.
    hi = np.maximum(ll1, ll2)
    lo = np.minimum(ll1, ll2)
    return np.sum(np.exp(log_m + hi) * np.expm1(0.5 * (lo - hi)) ** 2, axis=-1)


def bures_distance_commuting(spec1: EnsembleSpec, spec2: EnsembleSpec) -> float:
    """Bures distance between ``zeta_n(beta1)`` and ``zeta_n(beta2)`` from eigenvalues alone.

    The two matrices share an eigenbasis, so only the branch eigenvalues and
    multiplicities enter; everything is evaluated in log space.
    """
    if spec1.n != spec2.n:
        raise ShapeError(f"ensembles differ in size: n = {spec1.n} vs {spec2.n}")
    log_m = log_multiplicities(spec1.n)
    sq = _commuting_distance_sq(log_m, spec1.log_eigenvalues(), spec2.log_eigenvalues())
    return float(np.sqrt(min(sq, 2.0)))


def commuting_distance_grid(n: int, beta1, beta2) -> np.ndarray:
    """Vectorized commuting distance; ``beta1`` and ``beta2`` broadcast against each other."""
    b1, b2 = np.broadcast_arrays(np.asarray(beta1, dtype=float), np.asarray(beta2, dtype=float))
    log_m = log_multiplicities(n)
    sq = _commuting_distance_sq(log_m, log_eigenvalues(n, b1), log_eigenvalues(n, b2))
    return np.sqrt(np.clip(sq, 0.0, 2.0))


def commuting_root_fidelity(spec1: EnsembleSpec, spec2: EnsembleSpec) -> float:
    """``sum_q m_q sqrt(lambda_q^(1) lambda_q^(2))`` with a max shift in log space."""
    if spec1.n != spec2.n:
        raise ShapeError(f"ensembles differ in size: n = {spec1.n} vs {spec2.n}")
    x = log_multiplicities(spec1.n) + 0.5 * (spec1.log_eigenvalues() + spec2.log_eigenvalues())
    top = np.max(x)
    return float(np.exp(top) * np.sum(np.exp(x - top)))


def default_step(beta: float) -> float:
    return 1e-3 * max(1.0, beta)


def hs_on_roots_metric(spec: EnsembleSpec, beta_step: float | None = None) -> float:
    """``g_bb`` as the Hilbert-Schmidt metric on square roots, ``tr (d sqrt(rho) / d beta)^2``.

    With ``d sqrt(lambda) = sqrt(lambda) d log(lambda) / 2`` the trace becomes
    ``sum_q m_q lambda_q (d log lambda_q / d beta)^2 / 4``; the log-eigenvalue
    derivative is a Richardson-extrapolated central difference with step
    ``beta_step``.
    """
    h = default_step(spec.beta) if beta_step is None else float(beta_step)
    if not h > 0:
        raise DomainError(f"step must be positive, got {beta_step!r}")
    if spec.beta <= h:
        raise DomainError(f"beta = {spec.beta} is too close to 0 for step {h}")
    n, b = spec.n, spec.beta

    def dlog(hh):
        return (log_eigenvalues(n, b + hh) - log_eigenvalues(n, b - hh)) / (2 * hh)

    slope = (4.0 * dlog(0.5 * h) - dlog(h)) / 3.0
    weights = np.exp(log_multiplicities(n) + spec.log_eigenvalues())
    return float(np.sum(weights * slope**2) / 4.0)


def metric_from_distance(dist_fn, beta: float, t_step: float | None = None) -> float:
    """``g_bb = (1/2) d^2/dt^2 [d(beta, beta + t)^2]`` at ``t = 0``.

    Second central difference with one Richardson step, using the exact
    value ``d(beta, beta)^2 = 0`` at the centre instead of evaluating it.

    Raises
    ------
    AccuracyError
        If the squared distances at the stencil are zero/non-finite, or the two
        step sizes disagree by more than one percent.
    """
    t = default_step(beta) if t_step is None else float(t_step)
    if not (beta > 0 and t > 0):
        raise DomainError(f"need beta > 0 and t_step > 0, got {beta!r}, {t_step!r}")
    if beta - t <= 0:
        raise DomainError(f"beta = {beta} is too close to 0 for step {t}")

    cache = {}

    def sq(dt):
        if dt not in cache:
            cache[dt] = dist_fn(beta, beta + dt) ** 2
        return cache[dt]

    for dt in (t, -t, 0.5 * t, -0.5 * t):
        val = sq(dt)
        if not np.isfinite(val) or val <= 0.0:
            raise AccuracyError(f"squared distance {val!r} at offset {dt} is unusable; adjust t_step")
    coarse = (sq(t) + sq(-t)) / t**2
    fine = (sq(0.5 * t) + sq(-0.5 * t)) / (0.5 * t) ** 2
    if abs(coarse - fine) > 1e-2 * abs(fine):
        raise AccuracyError(f"step {t} is too coarse: estimates {coarse:.6e} vs {fine:.6e}")
    return 0.5 * second_central(sq, 0.0, t, f0=0.0)


def ensemble_distance_fn(n: int):
    """``(beta1, beta2) -> d_B(zeta_n(beta1), zeta_n(beta2))`` through the commuting fast path."""
    return lambda b1, b2: bures_distance_commuting(EnsembleSpec(n, b1), EnsembleSpec(n, b2))
