"""Gibbs-averaged tensor-power ensembles ``zeta_n(beta)``.

``zeta_n(beta)`` is the average of ``rho_complex^{(x)n}`` over the Bloch ball
under the weight

    Gamma(3/2 + beta) r^2 sin(theta) / (pi^{3/2} Gamma(beta) (1 - r^2)^{1 - beta}),

equivalently a Gibbs law ``exp(-beta E) Omega(E) / Z(beta)`` in the energy
``E = -log(1 - r^2)``. The spectrum is known in closed form: ``floor(n/2) + 1``
distinct eigenvalues with integer multiplicities, which is what makes Bures
distances for ``n = 100`` (matrices of size ``2^100``) computable.

Everything that touches Gamma functions works in log space.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, roots_jacobi

from .errors import AccuracyError, DomainError, SizeError
from .families import IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z

LOG_2 = math.log(2.0)
AVERAGED_MATRIX_MAX_N = 7
# scipy's Gauss-Jacobi normalization overflows near beta = 1000
AVERAGED_MATRIX_MAX_BETA = 500.0


@dataclass(frozen=True)
class EnsembleSpec:
    """Number of qubits ``n`` and inverse-temperature-like parameter ``beta > 0``."""

    n: int
    beta: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise DomainError(f"beta must be positive, got {self.beta!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def u(self) -> float:
        """Exponent of the original averaging family, ``u = 1 - beta``."""
        return 1.0 - self.beta

    @property
    def n_branches(self) -> int:
        return self.n // 2 + 1

    def log_eigenvalues(self) -> np.ndarray:
        return log_eigenvalues(self.n, self.beta)

    def log_multiplicities(self) -> np.ndarray:
        return log_multiplicities(self.n)


class EigenBranch(NamedTuple):
    q: int
    log_lambda: float
    log_mult: float

    @property
    def eigenvalue(self) -> float:
        return math.exp(self.log_lambda)

    @property
    def multiplicity(self) -> float:
        return math.exp(self.log_mult)


def _check_beta(beta) -> np.ndarray:
    b = np.asarray(beta, dtype=float)
    if np.any(~np.isfinite(b)) or np.any(b <= 0):
        raise DomainError(f"beta must be positive, got {beta!r}")
    return b


def multiplicity(n: int, q: int) -> int:
    """Exact multiplicity ``(n - 2q + 1)^2 C(n+1, q) / (n + 1)`` of branch ``q``."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if int(q) != q or not 0 <= q <= n // 2:
        raise DomainError(f"q must lie in [0, {n // 2}], got {q!r}")
    n, q = int(n), int(q)
    num = (n - 2 * q + 1) ** 2 * math.comb(n + 1, q)
    m, rem = divmod(num, n + 1)
    assert rem == 0
    return m


EXACT_MULTIPLICITY_MAX_N = 512


def log_multiplicities(n: int) -> np.ndarray:
    """``log m_q`` for ``q = 0..floor(n/2)``: exact integers up to ``n = 512``, log-Gamma beyond."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if n <= EXACT_MULTIPLICITY_MAX_N:
        # math.log is exact-enough on arbitrary-size ints
        return np.array([math.log(multiplicity(n, q)) for q in range(n // 2 + 1)])
    q = np.arange(n // 2 + 1, dtype=float)
    return (
        2.0 * np.log(n - 2.0 * q + 1.0)
        + gammaln(n + 2.0) - gammaln(q + 1.0) - gammaln(n - q + 2.0)
        - math.log(n + 1.0)
    )


def log_eigenvalues(n: int, beta) -> np.ndarray:
    """Log of the ``floor(n/2) + 1`` distinct eigenvalues of ``zeta_n(beta)``.

    ``beta`` may be an array; the branch index ``q`` is the trailing axis.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    b = _check_beta(beta)[..., None]
    q = np.arange(int(n) // 2 + 1, dtype=float)
    return (
        -n * LOG_2
        + gammaln(1.5 + b)
        + gammaln(b + q)
        + gammaln(1.0 + b - q + n)
        - gammaln(b)
        - gammaln(1.0 + b + n / 2)
        - gammaln(1.5 + b + n / 2)
    )


def eigen_branches(spec: EnsembleSpec) -> list[EigenBranch]:
    ll = spec.log_eigenvalues()
    lm = spec.log_multiplicities()
    return [EigenBranch(q, float(ll[q]), float(lm[q])) for q in range(spec.n_branches)]


def log_trace(n: int, beta) -> np.ndarray:
    """``log sum_q m_q lambda_q`` computed with a max shift; zero for a valid spectrum."""
    x = log_eigenvalues(n, beta) + log_multiplicities(n)
    top = np.max(x, axis=-1, keepdims=True)
    return (top + np.log(np.sum(np.exp(x - top), axis=-1, keepdims=True)))[..., 0]


def full_spectrum(spec: EnsembleSpec) -> np.ndarray:
    """All ``2^n`` eigenvalues, ascending, repeated by multiplicity (small ``n`` only)."""
    if spec.n > 24:
        raise SizeError(f"refusing to materialize 2^{spec.n} eigenvalues")
    vals = np.exp(spec.log_eigenvalues())
    counts = [multiplicity(spec.n, q) for q in range(spec.n_branches)]
    return np.sort(np.repeat(vals, counts))


def partition_function(beta):
    """``Z(beta) = sqrt(pi) Gamma(beta) / (2 Gamma(3/2 + beta))``."""
    b = _check_beta(beta)
    out = np.exp(0.5 * math.log(math.pi) - LOG_2 + gammaln(b) - gammaln(1.5 + b))
    return float(out) if out.ndim == 0 else out


def structure_function(energy):
    """Density of states ``Omega(E) = sqrt(1 - exp(-E))``."""
    e = np.asarray(energy, dtype=float)
    return np.sqrt(-np.expm1(-e))


def energy_from_radius(r):
    return -np.log1p(-np.asarray(r, dtype=float) ** 2)


def radius_from_energy(energy):
    return structure_function(energy)


def gibbs_density(energy, beta):
    """``exp(-beta E) Omega(E) / Z(beta)`` on ``E >= 0``."""
    b = float(_check_beta(beta))
    e = np.asarray(energy, dtype=float)
    if np.any(e < 0) or np.any(~np.isfinite(e)):
        raise DomainError("energy must be finite and non-negative")
    out = np.exp(-b * e) * structure_function(e) / partition_function(b)
    return float(out) if out.ndim == 0 else out


def averaging_weight(r, theta, beta):
    """Density on the Bloch ball (w.r.t. ``dr dtheta dphi``) used to build ``zeta_n``."""
    b = float(_check_beta(beta))
    r = np.asarray(r, dtype=float)
    log_c = gammaln(1.5 + b) - gammaln(b) - 1.5 * math.log(math.pi)
    return np.exp(log_c) * r**2 * np.sin(theta) * (1.0 - r**2) ** (b - 1.0)


def radial_weight(r, beta):
    """``averaging_weight`` integrated over the angles (a density in ``r`` on [0, 1])."""
    b = float(_check_beta(beta))
    r = np.asarray(r, dtype=float)
    log_c = gammaln(1.5 + b) - gammaln(b) - 0.5 * math.log(math.pi) + 2 * LOG_2
    return np.exp(log_c) * r**2 * (1.0 - r**2) ** (b - 1.0)


def _gauss_legendre(order: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _radial_rule(beta: float, order: int):
    """Nodes and weights for integrals against ``r^2 (1 - r^2)^(beta - 1) dr`` on [0, 1].

    Gauss-Jacobi in ``t = r^2`` with weight ``t^(1/2) (1 - t)^(beta - 1)``.
    After the exact angular average only even powers of ``r`` survive, so the
    radial integrand is a polynomial in ``t`` and the rule is exact for every ``beta``.
    """
    x, w = roots_jacobi(order, beta - 1.0, 0.5)
    t = 0.5 * (1.0 + x)
    return np.sqrt(t), w * 2.0 ** (-beta - 1.5)


def _averaged_matrix_at_order(n: int, beta: float, radial_order: int, angular_order: int,
                              batch: int = 2048) -> np.ndarray:
    r, w_r = _radial_rule(beta, radial_order)
    # sin(theta) d theta = d cos(theta)
    x, w_x = _gauss_legendre(angular_order, -1.0, 1.0)
    # periodic trapezoid rule: exact for trigonometric polynomials of degree < angular_order
    phi = 2.0 * math.pi * np.arange(angular_order) / angular_order
    w_phi = np.full(angular_order, 2.0 * math.pi / angular_order)
    norm = math.exp(gammaln(1.5 + beta) - gammaln(beta) - 1.5 * math.log(math.pi))

    rr, xx, pp = np.meshgrid(r, x, phi, indexing="ij")
    ww = np.einsum("i,j,k->ijk", w_r, w_x, w_phi) * norm
    st = np.sqrt(1.0 - xx**2)
    bx = (rr * st * np.cos(pp)).ravel()
    by = (rr * st * np.sin(pp)).ravel()
    bz = (rr * xx).ravel()
    ww = ww.ravel()

    dim = 2**n
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for s in range(0, ww.size, batch):
        sl = slice(s, s + batch)
        one = 0.5 * (
            IDENTITY_2[None]
            + bx[sl, None, None] * SIGMA_X[None]
            + by[sl, None, None] * SIGMA_Y[None]
            + bz[sl, None, None] * SIGMA_Z[None]
        )
        m = one
        for _ in range(n - 1):
            k = m.shape[1]
            m = np.einsum("bij,bkl->bikjl", m, one).reshape(-1, 2 * k, 2 * k)
        acc += np.tensordot(ww[sl], m, axes=1)
    return 0.5 * (acc + acc.conj().T)


def averaged_matrix(spec: EnsembleSpec, order: int | None = None, max_order: int = 256,
                    tol: float = 1e-8) -> np.ndarray:
    """Build ``zeta_n(beta)`` by direct product quadrature over the Bloch ball.

    This is an independent construction, used to check the closed-form
    eigenvalues. Gauss-Legendre in ``cos(theta)``, the periodic trapezoid
    rule in ``phi`` and Gauss-Jacobi in ``t = r^2`` (see :func:`_radial_rule`).

    The integrand is a polynomial of degree ``n`` in the Bloch vector, so the
    default ``n + 1`` nodes per axis are already exact. The order is doubled
    on every axis until successive estimates differ by less than ``tol / 100``
    and the trace is within ``tol`` of one.

    Raises
    ------
    SizeError
        For ``n > 7``.
    DomainError
        For ``beta > 500``.
    AccuracyError
        If the trace is still off by more than ``1e-6`` at ``max_order``.
    """
    if spec.n > AVERAGED_MATRIX_MAX_N:
        raise SizeError(f"quadrature oracle is limited to n <= {AVERAGED_MATRIX_MAX_N}, got {spec.n}")
    if spec.beta > AVERAGED_MATRIX_MAX_BETA:
        raise DomainError(f"quadrature oracle is limited to beta <= {AVERAGED_MATRIX_MAX_BETA}, got {spec.beta}")
    n, beta = spec.n, spec.beta
    order = n + 1 if order is None else int(order)
    prev = _averaged_matrix_at_order(n, beta, order, order)
    trace_err = abs(np.trace(prev).real - 1.0)
    while order * 2 <= max_order:
        order *= 2
        cur = _averaged_matrix_at_order(n, beta, order, order)
        change = np.max(np.abs(cur - prev))
        prev = cur
        trace_err = abs(np.trace(cur).real - 1.0)
        if change < tol * 1e-2 and trace_err < tol:
            return cur
    if not trace_err <= 1e-6:
        raise AccuracyError(
            f"quadrature for zeta_{n}({beta}) did not converge: trace off by {trace_err:.2e}"
        )
    warnings.warn(
        f"quadrature for zeta_{n}({beta}) stopped at order {order} with trace error {trace_err:.2e}",
        RuntimeWarning,
        stacklevel=2,
    )
    return prev


# Closed forms for the one-dimensional metric element g_bb, n = 2..7.
# Numerator polynomial coefficients (ascending powers of beta), overall
# numerator constant, linear denominator factors (a + beta), squared factors (a + 2 beta).
_G_BB_FORMS = {
    2: (3, (1,), (0, 2), (3,)),
    3: (9, (1,), (0, 3), (3,)),
    4: (9, (145, 310, 230, 72, 8), (0, 1, 3, 4), (3, 5)),
    5: (15, (185, 380, 270, 80, 8), (0, 1, 4, 5), (3, 5)),
    6: (45, (43260, 143640, 201740, 157170, 74361, 21864, 3896, 384, 16),
        (0, 1, 2, 4, 5, 6), (3, 5, 7)),
    7: (63, (61950, 200025, 273140, 206472, 94369, 26616, 4504, 416, 16),
        (0, 1, 2, 5, 6, 7), (3, 5, 7)),
}


def reference_g_bb(n: int, beta):
    """Closed-form Bures metric element ``g_bb`` of ``zeta_n(beta)`` for ``2 <= n <= 7``."""
    if n not in _G_BB_FORMS:
        raise DomainError(f"closed forms exist for n = 2..7, got {n!r}")
    b = _check_beta(beta)
    const, poly, linear, squared = _G_BB_FORMS[n]
    num = const * np.polynomial.polynomial.polyval(b, poly)
    den = 4.0 * np.ones_like(b)
    for a in linear:
        den = den * (a + b)
    for a in squared:
        den = den * (a + 2 * b) ** 2
    out = num / den
    return float(out) if out.ndim == 0 else out


def reference_distance(n: int, beta1, beta2):
    """Closed-form Bures distance between ``zeta_n(beta1)`` and ``zeta_n(beta2)``, n = 2 or 3."""
    b1 = _check_beta(beta1)
    b2 = _check_beta(beta2)
    den = (3 + 2 * b1) * (3 + 2 * b2)
    if n == 2:
        sq = 2 - np.sqrt(b1 * b2 / den) - 3 * np.sqrt((2 + b1) * (2 + b2) / den)
    elif n == 3:
        sq = 2 - 2 * np.sqrt(b1 * b2 / den) - 2 * np.sqrt((3 + b1) * (3 + b2) / den)
    else:
        raise DomainError(f"closed-form distances exist for n = 2, 3, got {n!r}")
    out = np.sqrt(np.clip(sq, 0.0, None))
    return float(out) if out.ndim == 0 else out


def reference_length(n: int, beta1, beta2):
    """Closed-form arc length of ``sqrt(g_bb)`` from ``beta1`` to ``beta2`` (signed), n = 2 or 3."""
    b1 = _check_beta(beta1)
    b2 = _check_beta(beta2)
    if n == 2:
        f = lambda b: np.arctan(np.sqrt(b) / (np.sqrt(3.0) * np.sqrt(b + 2)))  # noqa: E731
    elif n == 3:
        f = lambda b: np.arctan(np.sqrt(b) / np.sqrt(b + 3))  # noqa: E731
    else:
        raise DomainError(f"closed-form lengths exist for n = 2, 3, got {n!r}")
    out = f(b2) - f(b1)
    return float(out) if out.ndim == 0 else out
