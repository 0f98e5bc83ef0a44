"""Parameterized density-matrix charts.

A :class:`ParamFamily` maps a coordinate vector to a density matrix and
supplies the analytic partial derivatives of that matrix. Two base charts are
provided (real qubit on the unit disk, complex qubit on the Bloch ball), plus
tensor powers of any family.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, SizeError
from .linalg import DEFAULT_DIM_CAP, kron_all

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)


@dataclass(frozen=True)
class ParamFamily:
    """A chart ``point -> rho(point)`` with parameter derivatives.

    Attributes
    ----------
    label : str
        Short identifier, e.g. ``"real"`` or ``"complex^2"``.
    n_params : int
        Number of chart coordinates.
    dim : int
        Hilbert-space dimension of the density matrices.
    evaluate : callable
        ``evaluate(point) -> ndarray`` of shape ``(dim, dim)``.
    derivative : callable
        ``derivative(point, axis) -> ndarray``, the partial derivative of the
        density matrix along coordinate ``axis``.
    """

    label: str
    n_params: int
    dim: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray, int], np.ndarray]

    def __call__(self, point) -> np.ndarray:
        return self.evaluate(point)

    def derivatives(self, point) -> list[np.ndarray]:
        return [self.derivative(point, a) for a in range(self.n_params)]


def _coords(point, n: int) -> np.ndarray:
    p = np.asarray(point, dtype=float).reshape(-1)
    if p.shape[0] != n:
        raise DomainError(f"expected {n} coordinates, got {p.shape[0]}")
    r = p[0]
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"radius must lie in [0, 1], got {float(r)}")
    return p


def _from_bloch(b) -> np.ndarray:
    return 0.5 * (IDENTITY_2 + b[0] * SIGMA_X + b[1] * SIGMA_Y + b[2] * SIGMA_Z)


def _pauli_combination(b) -> np.ndarray:
    return 0.5 * (b[0] * SIGMA_X + b[1] * SIGMA_Y + b[2] * SIGMA_Z)


def rho_real(point) -> np.ndarray:
    """Real qubit on the unit disk: polar coordinates ``(r, theta)``.

    Diagonal ``(1 +- r cos theta)/2``, off-diagonal ``r sin theta / 2``.
    """
    r, th = _coords(point, 2)
    return _from_bloch((r * np.sin(th), 0.0, r * np.cos(th)))


def d_rho_real(point, axis: int) -> np.ndarray:
    r, th = _coords(point, 2)
    if axis == 0:
        return _pauli_combination((np.sin(th), 0.0, np.cos(th)))
    if axis == 1:
        return _pauli_combination((r * np.cos(th), 0.0, -r * np.sin(th)))
    raise IndexError(f"real-qubit chart has 2 coordinates, got axis {axis}")


def rho_complex(point) -> np.ndarray:
    """Complex qubit on the Bloch ball: spherical coordinates ``(r, theta, phi)``.

    Uses the standard Bloch form, upper off-diagonal
    ``r sin(theta) (cos(phi) - i sin(phi)) / 2``.
    """
    r, th, ph = _coords(point, 3)
    st = np.sin(th)
    return _from_bloch((r * st * np.cos(ph), r * st * np.sin(ph), r * np.cos(th)))


def d_rho_complex(point, axis: int) -> np.ndarray:
    r, th, ph = _coords(point, 3)
    st, ct, sp, cp = np.sin(th), np.cos(th), np.sin(ph), np.cos(ph)
    if axis == 0:
        b = (st * cp, st * sp, ct)
    elif axis == 1:
        b = (r * ct * cp, r * ct * sp, -r * st)
    elif axis == 2:
        b = (-r * st * sp, r * st * cp, 0.0)
    else:
        raise IndexError(f"complex-qubit chart has 3 coordinates, got axis {axis}")
    return _pauli_combination(b)


REAL_QUBIT = ParamFamily("real", 2, 2, rho_real, d_rho_real)
COMPLEX_QUBIT = ParamFamily("complex", 3, 2, rho_complex, d_rho_complex)


def real_qubit() -> ParamFamily:
    return REAL_QUBIT


def complex_qubit() -> ParamFamily:
    return COMPLEX_QUBIT


def product_family(base: ParamFamily, n: int, cap: int = DEFAULT_DIM_CAP) -> ParamFamily:
    """The ``n``-fold tensor power of ``base``.

    The derivative follows the Leibniz rule: the sum over slots ``k`` of
    ``rho x ... x d rho x ... x rho`` with the derivative in slot ``k``.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if n == 1:
        return base
    dim = base.dim**n
    if dim > cap:
        raise SizeError(f"{n}-fold product of a {base.dim}-dim family exceeds the dense cap {cap}")

    def evaluate(point):
        return kron_all([base.evaluate(point)] * n, cap=cap)

    def derivative(point, axis):
        rho = base.evaluate(point)
        drho = base.derivative(point, axis)
        # powers[k] = rho^{(x)k}
        powers = [np.ones((1, 1), dtype=np.complex128)]
        for _ in range(n - 1):
            powers.append(np.kron(powers[-1], rho))
        out = np.zeros((dim, dim), dtype=np.complex128)
        for k in range(n):
            out += np.kron(np.kron(powers[k], drho), powers[n - 1 - k])
        return out

    return ParamFamily(f"{base.label}^{n}", base.n_params, dim, evaluate, derivative)


def conjugated_family(base: ParamFamily, unitary) -> ParamFamily:
    """``U rho U^dagger`` for a fixed unitary ``U``; used for gauge checks."""
    u = np.asarray(unitary, dtype=np.complex128)
    if u.shape != (base.dim, base.dim):
        raise ValueError(f"unitary has shape {u.shape}, family dimension is {base.dim}")
    uh = u.conj().T
    return ParamFamily(
        f"U.{base.label}.U^H",
        base.n_params,
        base.dim,
        lambda p: u @ base.evaluate(p) @ uh,
        lambda p, a: u @ base.derivative(p, a) @ uh,
    )


def finite_difference_derivative(family: ParamFamily, point, axis: int, h: float = 1e-5) -> np.ndarray:
    """Central difference of the chart along one coordinate (cross-check helper)."""
    p = np.asarray(point, dtype=float)
    e = np.zeros_like(p)
    e[axis] = h
    return (family.evaluate(p + e) - family.evaluate(p - e)) / (2 * h)


def family_by_name(name: str, n: int = 1) -> ParamFamily:
    """Resolve the CLI family names ``real``, ``complex``, ``real-product``, ``complex-product``."""
    if name in ("real", "real-product"):
        base = REAL_QUBIT
    elif name in ("complex", "complex-product"):
        base = COMPLEX_QUBIT
    else:
        raise ValueError(f"unknown family {name!r}")
    return product_family(base, n)
