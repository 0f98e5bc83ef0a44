"""Dense complex Hermitian linear algebra.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; the helpers here
validate them and provide the handful of spectral operations the rest of the
package needs (eigendecomposition with orthonormalized degenerate clusters,
Kronecker products and powers, PSD square roots).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import (
    ConvergenceError,
    NotHermitianError,
    NotPSDError,
    ShapeError,
    SizeError,
)

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-10
PSD_CLAMP = 1e-10
DEGENERACY_RTOL = 1e-10

# Dense storage only; 2**13 x 2**13 complex128 is already ~1 GiB.
DEFAULT_DIM_CAP = 2**13


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues and the matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite square complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def is_hermitian(m, atol: float = HERMITIAN_ATOL) -> bool:
    a = np.asarray(m)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.allclose(a, a.conj().T, rtol=0, atol=atol)


def as_hermitian(m, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate Hermiticity entrywise and return the exactly symmetrized matrix."""
    a = as_matrix(m)
    err = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if err > atol:
        raise NotHermitianError(f"matrix is not Hermitian (max |m - m^H| = {err:.3e})")
    return 0.5 * (a + a.conj().T)


def as_density(m, trace_atol: float = TRACE_ATOL, psd_tol: float = PSD_CLAMP) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, eigenvalues >= -psd_tol."""
    a = as_hermitian(m)
    tr = np.trace(a).real
    if abs(tr - 1.0) > trace_atol:
        raise ValueError(f"density matrix must have unit trace, got {tr}")
    lo = np.linalg.eigvalsh(a)[0]
    if lo < -psd_tol:
        raise NotPSDError(f"density matrix has negative eigenvalue {lo:.3e}")
    return a


def _orthonormalize_clusters(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt inside each cluster of (numerically) equal eigenvalues."""
    scale = np.max(np.abs(w)) if w.size else 0.0
    if scale == 0.0:
        scale = 1.0
    gap = DEGENERACY_RTOL * scale
    v = v.copy()
    start = 0
    n = w.shape[0]
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[stop - 1] < gap:
            stop += 1
        if stop - start > 1:
            for j in range(start, stop):
                for k in range(start, j):
                    v[:, j] -= np.vdot(v[:, k], v[:, j]) * v[:, k]
                v[:, j] /= np.linalg.norm(v[:, j])
        start = stop
    return v


def eigh(m) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues come back ascending. Eigenvectors inside each degenerate
    cluster (gap below ``1e-10 * max|lambda|``) are re-orthonormalized with
    modified Gram-Schmidt, so the basis is orthonormal even where LAPACK is
    free to return any basis of the eigenspace.
    """
    a = as_hermitian(m)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(
            f"eigendecomposition did not converge for a {a.shape[0]}x{a.shape[0]} matrix",
            dim=a.shape[0],
        ) from exc
    return Spectrum(w, _orthonormalize_clusters(w, v))


def _check_cap(dim: int, cap: int) -> None:
    if dim > cap:
        raise SizeError(f"result dimension {dim} exceeds the dense cap {cap}")


def kron(a, b, cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Kronecker product of two Hermitian matrices."""
    a = as_hermitian(a)
    b = as_hermitian(b)
    _check_cap(a.shape[0] * b.shape[0], cap)
    return np.kron(a, b)


def tensor_power(rho, n: int, cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """``rho`` tensored with itself ``n`` times (``n = 1`` returns ``rho``)."""
    if int(n) != n or n < 1:
        raise ValueError(f"tensor power needs a positive integer, got {n!r}")
    rho = as_hermitian(rho)
    _check_cap(rho.shape[0] ** int(n), cap)
    return reduce(np.kron, [rho] * int(n))


def kron_all(factors, cap: int = DEFAULT_DIM_CAP) -> np.ndarray:
    """Kronecker product of a sequence of (not necessarily Hermitian) matrices."""
    factors = [np.asarray(f, dtype=np.complex128) for f in factors]
    _check_cap(int(np.prod([f.shape[0] for f in factors])), cap)
    return reduce(np.kron, factors)


def sqrtm_psd(m, clamp: float = PSD_CLAMP) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-clamp, 0)`` are treated as round-off and set to zero;
    anything more negative raises :class:`NotPSDError`.
    """
    s = eigh(m)
    w = s.eigenvalues
    if w.size and w[0] < -clamp:
        raise NotPSDError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    root = np.sqrt(np.clip(w, 0.0, None))
    v = s.eigenvectors
    out = (v * root) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed density matrix, full rank unless ``rank`` is given."""
    k = dim if rank is None else rank
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
