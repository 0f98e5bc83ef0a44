"""Acceptance checks, one group per numbered criterion.

Each check measures an error and compares it against a pinned tolerance.
``run_checks`` is what the ``verify`` command and ``tests/test_acceptance.py``
both execute.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import geometry as geo
from .bures import (
    bures_distance,
    bures_distance_commuting,
    ensemble_distance_fn,
    hs_on_roots_metric,
    metric_at,
    metric_from_distance,
)
from .ensemble import (
    EnsembleSpec,
    averaged_matrix,
    full_spectrum,
    log_trace,
    multiplicity,
    reference_distance,
    reference_g_bb,
    reference_length,
)
from .families import COMPLEX_QUBIT, REAL_QUBIT, conjugated_family, product_family
from .figures import excess_data, fig2_data
from .linalg import random_density_matrix, random_unitary

SEED = 20240607

# Reference values for the normalization of sqrt(g_bb) over beta in [0, inf).
REFERENCE_NORMALIZERS = {2: math.pi / 6, 3: math.pi / 4, 4: 0.987405, 5: 1.1533, 6: 1.29428, 7: 1.42688}


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    measured: float
    tolerance: float
    passed: bool
    skipped: bool = False

    def line(self) -> str:
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        return f"[{status}] C{self.criterion:<2d} {self.name}: {self.measured:.3e} (tol {self.tolerance:.1e})"


def _check(criterion, name, measured, tol) -> CheckResult:
    measured = float(measured)
    return CheckResult(criterion, name, measured, tol, bool(np.isfinite(measured) and measured <= tol))


def _real_grid():
    return [(r, t) for r in np.linspace(0.1, 0.8, 5) for t in np.linspace(0.3, 2 * math.pi - 0.3, 5)]


def _random_ball_points(rng, count):
    return [
        (rng.uniform(0.1, 0.9), rng.uniform(0.2, math.pi - 0.2), rng.uniform(0.0, 2 * math.pi))
        for _ in range(count)
    ]


@lru_cache(maxsize=None)
def _zeta(n: int, beta: float) -> np.ndarray:
    return averaged_matrix(EnsembleSpec(n, beta))


def criterion_1(scale=1.0, skip_large=False):
    out = []
    ns = [(n, 1e-8, 30.0) for n in range(1, 6)]
    large = [(6, 1e-7, 300.0), (7, 1e-7, 300.0)]
    for group in (ns, large):
        if group is large and skip_large:
            out.append(CheckResult(1, "real-product metric n=6,7 (skipped by config)", 0.0, 1e-7, True, True))
            continue
        start = time.perf_counter()
        for n, tol, _ in group:
            fam = product_family(REAL_QUBIT, n)
            err = 0.0
            for r, t in _real_grid():
                g = metric_at(fam, (r, t))
                want = np.array([[n / (4 * (1 - r * r)), 0.0], [0.0, n * r * r / 4]])
                err = max(err, np.max(np.abs(g - want)))
            out.append(_check(1, f"real-product metric closed form n={n}", err, tol * scale))
        elapsed = time.perf_counter() - start
        limit = group[0][2]
        label = "n=1..5" if group is ns else "n=6,7"
        out.append(_check(1, f"real-product metric runtime {label} [s]", elapsed, limit))
    return out


def criterion_2(scale=1.0, **_):
    out = []
    grid = [(r, t) for r in np.linspace(0.1, 0.9, 7) for t in np.linspace(0.3, 2 * math.pi - 0.3, 7)]
    for n in range(1, 6):
        field = geo.family_field(product_family(REAL_QUBIT, n))
        ks = np.array([geo.gaussian_curvature_2d(field, p) for p in grid])
        out.append(_check(2, f"Gaussian curvature K = 4/n, n={n}", np.max(np.abs(ks - 4.0 / n)), 1e-5 * scale))
        out.append(_check(2, f"Gaussian curvature spread over grid, n={n}", np.ptp(ks), 1e-5 * scale))
    return out


def criterion_3(scale=1.0, **_):
    rng = np.random.default_rng(SEED)
    out = []
    pts = _random_ball_points(rng, 10)
    err = 0.0
    for r, t, p in pts:
        want = np.diag([1 / (4 * (1 - r * r)), r * r / 4, (r * math.sin(t)) ** 2 / 4])
        err = max(err, np.max(np.abs(metric_at(COMPLEX_QUBIT, (r, t, p)) - want)))
    out.append(_check(3, "complex-qubit metric closed form", err, 1e-8 * scale))

    field1 = geo.family_field(COMPLEX_QUBIT, diagonal=True)
    curv = [geo.scalar_curvature_diag3(field1, q) for q in pts]
    out.append(_check(3, "complex-qubit scalar curvature = -24", np.max(np.abs(np.array(curv) + 24)), 1e-4 * scale))

    fam2 = product_family(COMPLEX_QUBIT, 2)
    pts2 = _random_ball_points(rng, 10)
    err2 = max(np.max(np.abs(metric_at(fam2, q) - 2 * metric_at(COMPLEX_QUBIT, q))) for q in pts2)
    out.append(_check(3, "2-fold complex metric = 2 x single qubit", err2, 1e-7 * scale))

    field2 = geo.family_field(fam2, diagonal=True)
    curv2 = [geo.scalar_curvature_diag3(field2, q) for q in pts2[:3]]
    out.append(_check(3, "2-fold complex scalar curvature = -12", np.max(np.abs(np.array(curv2) + 12)), 1e-3 * scale))
    return out


def criterion_4(scale=1.0, **_):
    out = []
    worst = 0.0
    count_ok = True
    for n in range(2, 6):
        for beta in (0.5, 1.0, 2.0):
            spec = EnsembleSpec(n, beta)
            w = np.linalg.eigvalsh(_zeta(n, beta))
            worst = max(worst, np.max(np.abs(w - full_spectrum(spec))))
            lam = np.exp(spec.log_eigenvalues())
            nearest = np.argmin(np.abs(w[:, None] - lam[None, :]), axis=1)
            counts = np.bincount(nearest, minlength=lam.size)
            count_ok &= all(counts[q] == multiplicity(n, q) for q in range(lam.size))
    out.append(_check(4, "quadrature spectrum vs closed-form eigenvalues, n=2..5", worst, 1e-7 * scale))
    out.append(CheckResult(4, "quadrature eigenvalue counts = multiplicities", 0.0 if count_ok else 1.0, 0.0, count_ok))
    trace_err = max(
        float(np.max(np.abs(np.expm1(log_trace(n, np.array([0.1, 1.0, 10.0]))))))
        for n in range(1, 201)
    )
    out.append(_check(4, "trace identity sum m*lambda = 1, n<=200", trace_err, 1e-9 * scale))
    return out


def criterion_5(scale=1.0, **_):
    out = []
    for n in range(2, 8):
        hs_err = 0.0
        fd_err = 0.0
        dist = ensemble_distance_fn(n)
        for beta in (0.5, 1.0, 2.0, 5.0):
            ref = reference_g_bb(n, beta)
            hs_err = max(hs_err, abs(hs_on_roots_metric(EnsembleSpec(n, beta)) / ref - 1))
            fd_err = max(fd_err, abs(metric_from_distance(dist, beta) / ref - 1))
        out.append(_check(5, f"Hilbert-Schmidt-on-roots g_bb vs closed form n={n} (rel)", hs_err, 1e-5 * scale))
        out.append(_check(5, f"distance-curvature g_bb vs closed form n={n} (rel)", fd_err, 1e-5 * scale))
    return out


def criterion_6(scale=1.0, **_):
    out = []
    # Separated pairs only: at beta1 = beta2 the printed closed form is the square
    # root of pure cancellation and carries ~1e-8 of round-off by itself.
    pairs = [(b1, b2) for b1 in (0.1, 0.5, 1.0, 3.0, 10.0) for b2 in (0.2, 1.5, 2.0, 7.5)]
    for n in (2, 3):
        err = max(
            abs(bures_distance_commuting(EnsembleSpec(n, b1), EnsembleSpec(n, b2)) - reference_distance(n, b1, b2))
            for b1, b2 in pairs
        )
        out.append(_check(6, f"commuting distance vs closed form n={n}", err, 1e-10 * scale))
    dense_pairs = [(0.5, 2.0), (1.0, 3.0), (2.0, 1.0)]
    for n in range(1, 6):
        err = max(
            abs(bures_distance_commuting(EnsembleSpec(n, b1), EnsembleSpec(n, b2)) - bures_distance(_zeta(n, b1), _zeta(n, b2)))
            for b1, b2 in dense_pairs
        )
        out.append(_check(6, f"commuting vs dense distance n={n}", err, 1e-8 * scale))
    return out


def criterion_7(scale=1.0, **_):
    start = time.perf_counter()
    _, rows = fig2_data()
    elapsed = time.perf_counter() - start
    grid = int(round(math.sqrt(rows.shape[0])))
    d = rows[:, 2].reshape(grid, grid)
    lo_violation = max(0.0, -float(np.min(d)))
    hi_violation = max(0.0, float(np.max(d)) - math.sqrt(2))
    return [
        _check(7, "n=100 surface runtime, 100x100 [s]", elapsed, 10.0),
        _check(7, "n=100 surface diagonal is zero", np.max(np.abs(np.diag(d))), 0.0),
        _check(7, "n=100 surface symmetry", np.max(np.abs(d - d.T)), 1e-12 * scale),
        _check(7, "n=100 surface within [0, sqrt 2]", max(lo_violation, hi_violation), 0.0),
    ]


def criterion_8(scale=1.0, **_):
    out = []
    norms = geo.length_normalizers()
    for n in (2, 3):
        out.append(_check(8, f"normalizer n={n} exact form", abs(norms[n] - REFERENCE_NORMALIZERS[n]), 1e-6 * scale))
    for n in (4, 5, 6, 7):
        rel = abs(norms[n] / REFERENCE_NORMALIZERS[n] - 1)
        out.append(_check(8, f"normalizer n={n} = {REFERENCE_NORMALIZERS[n]} (rel; computed {norms[n]:.6f})", rel, 1e-3 * scale))
    return out


def criterion_9(scale=1.0, **_):
    out = []
    real = geo.normalize_prior(geo.family_field(REAL_QUBIT), geo.DISK)
    err = max(
        abs(real((r, t)) - r / (2 * math.pi * math.sqrt(1 - r * r)))
        for r in np.linspace(0.05, 0.95, 7)
        for t in np.linspace(0.0, 6.0, 4)
    )
    out.append(_check(9, "real-qubit prior matches r/(2 pi sqrt(1-r^2))", err, 1e-8 * scale))
    cplx = geo.normalize_prior(geo.family_field(COMPLEX_QUBIT), geo.BALL)
    err = max(
        abs(cplx((r, t, p)) - r * r * math.sin(t) / (math.pi**2 * math.sqrt(1 - r * r)))
        for r in np.linspace(0.05, 0.95, 5)
        for t in np.linspace(0.1, 3.0, 4)
        for p in (0.0, 2.5)
    )
    out.append(_check(9, "complex-qubit prior matches r^2 sin/(pi^2 sqrt(1-r^2))", err, 1e-8 * scale))
    out.append(_check(9, "real-qubit prior integrates to 1", abs(_integrate_prior(real, 2) - 1), 1e-6 * scale))
    out.append(_check(9, "complex-qubit prior integrates to 1", abs(_integrate_prior(cplx, 3) - 1), 1e-6 * scale))
    return out


def _integrate_prior(prior, dim, radial_order=48, angular_order=12):
    # Independent of integrate_volume's r = sin(psi) rule: r = 1 - s^2 also
    # regularizes 1/sqrt(1 - r^2), and the nodes stay off the pure states at r = 1.
    s, ws = np.polynomial.legendre.leggauss(radial_order)
    s, ws = 0.5 * (s + 1), 0.5 * ws
    r, wr = 1.0 - s * s, 2.0 * s * ws
    x, w = np.polynomial.legendre.leggauss(angular_order)
    if dim == 2:
        th, wth = math.pi * (x + 1), math.pi * w
        return sum(wi * wj * prior((ri, tj)) for ri, wi in zip(r, wr) for tj, wj in zip(th, wth))
    th, wth = 0.5 * math.pi * (x + 1), 0.5 * math.pi * w
    ph, wph = math.pi * (x + 1), math.pi * w
    return sum(
        wi * wj * wk * prior((ri, tj, pk))
        for ri, wi in zip(r, wr)
        for tj, wj in zip(th, wth)
        for pk, wk in zip(ph, wph)
    )


def criterion_10(scale=1.0, **_):
    out = []
    for n, fig in ((2, 3), (3, 4)):
        _, rows = excess_data(n)
        out.append(_check(10, f"excess >= 0 on figure {fig} grid (n={n}), worst deficit", max(0.0, -float(np.min(rows[:, 2]))), 1e-9))
    pairs = [(0.05, 5.0), (1.0, 4.0), (1.0, 2.0), (3.0, 0.2), (0.5, 0.5001)]
    for n in (2, 3):
        err = max(abs(geo.integrated_length(n, b1, b2) - abs(reference_length(n, b1, b2))) for b1, b2 in pairs)
        out.append(_check(10, f"arc-length quadrature vs arctan closed form n={n}", err, 1e-8 * scale))
    return out


def _third_order_rate(family, point, direction, deltas=(2e-2, 1e-2, 5e-3)):
    p = np.asarray(point, dtype=float)
    g = metric_at(family, p)
    rho = family.evaluate(p)
    res = []
    for s in deltas:
        dv = s * direction
        res.append(abs(dv @ g @ dv - bures_distance(rho, family.evaluate(p + dv)) ** 2))
    return min(math.log2(res[i] / res[i + 1]) for i in range(len(res) - 1))


def criterion_11(scale=1.0, **_):
    rng = np.random.default_rng(SEED + 11)
    out = []
    families = [
        (REAL_QUBIT, (0.5, 1.1)),
        (COMPLEX_QUBIT, (0.4, 1.0, 2.0)),
        (product_family(REAL_QUBIT, 2), (0.6, 0.7)),
        (product_family(REAL_QUBIT, 3), (0.3, 2.5)),
        (product_family(COMPLEX_QUBIT, 2), (0.5, 2.0, 4.0)),
    ]
    worst_rate = math.inf
    for fam, pt in families:
        direction = rng.standard_normal(fam.n_params)
        direction /= np.linalg.norm(direction)
        worst_rate = min(worst_rate, _third_order_rate(fam, pt, direction))
    # observed order of |d^2 - delta.g.delta| under halving; 3 is the asymptotic value
    out.append(_check(11, "metric vs distance: 3 - observed decay order", max(0.0, 3.0 - worst_rate), 0.2))

    gauge = 0.0
    for fam, pt in families:
        u = random_unitary(fam.dim, rng)
        gauge = max(gauge, np.max(np.abs(metric_at(conjugated_family(fam, u), pt) - metric_at(fam, pt))))
    out.append(_check(11, "unitary-conjugation invariance of the metric", gauge, 1e-9 * scale))

    worst = -math.inf
    for _ in range(100):
        dim = int(rng.integers(2, 17))
        a, b, c = (random_density_matrix(dim, rng) for _ in range(3))
        worst = max(worst, bures_distance(a, c) - bures_distance(a, b) - bures_distance(b, c))
    out.append(_check(11, "triangle inequality, 100 random triples: worst excess", max(worst, 0.0), 1e-9))
    return out


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
}


def run_criterion(number: int, tol_scale: float = 1.0, skip_large: bool = False) -> list[CheckResult]:
    return CRITERIA[number](scale=tol_scale, skip_large=skip_large)


def run_checks(tol_scale: float = 1.0, skip_large: bool = False, criteria=None, report=None) -> list[CheckResult]:
    results = []
    for number in criteria or sorted(CRITERIA):
        for res in run_criterion(number, tol_scale, skip_large):
            results.append(res)
            if report is not None:
                report(res.line())
    return results
