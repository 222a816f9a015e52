"""Lax connection, Sklyanin K-matrix and boundary-compatibility identities.

All operations work both exactly (Fraction-valued spectral data, residuals are
exact zeros) and numerically (complex samples).  2x2 matrices are numpy arrays;
exact inputs produce object-dtype arrays of Fractions, so the same code path
serves both modes.

Conventions.  sigma_0 = diag(1, -1), sigma_+ = ((0,1),(0,0)),
sigma_- = ((0,0),(1,0)).  The connection is

    alpha_z    = (1/2) w_z sigma_0 + (i/(4 lam)) e^w sigma_+ + (i gam/4) e^{-w} sigma_-
    alpha_zbar = -(1/2) w_zbar sigma_0 + (i/(4 gam)) e^{-w} sigma_+ + (i lam/4) e^w sigma_-

with spectral parameter lam and torsion parameter gam, both nonzero.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .series import LaurentSeries

SIGMA_0 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


class ParameterDomainError(ValueError):
    """A spectral or torsion parameter lies outside its allowed domain."""


class SingularKMatrixError(ArithmeticError):
    """det K vanished where an inverse or D-normalisation was required."""


def _conj(x):
    """Complex conjugate that leaves exact rationals untouched."""
    return x.conjugate() if hasattr(x, "conjugate") else x


def matrix_norm(mat) -> float:
    """Max absolute entry; basis-stable and exact-friendly for 2x2 blocks."""
    return max(abs(mat[i][j]) for i in range(2) for j in range(2))


@dataclass(frozen=True)
class LaxPoint:
    """Pointwise data feeding the connection: w, its first derivatives, (lam, gam)."""

    omega: complex
    omega_z: complex
    omega_zbar: complex
    lam: complex
    gamma: complex

    def __post_init__(self):
        if self.lam == 0 or self.gamma == 0:
            raise ParameterDomainError("spectral and torsion parameters must be nonzero")


def lax_connection(p: LaxPoint) -> tuple[np.ndarray, np.ndarray]:
    """The (alpha_z, alpha_zbar) pair of traceless 2x2 matrices at a point."""
    ew = cmath.exp(p.omega)
    emw = cmath.exp(-p.omega)
    alpha_z = (
        0.5 * p.omega_z * SIGMA_0
        + (1j / (4 * p.lam)) * ew * SIGMA_PLUS
        + (1j * p.gamma / 4) * emw * SIGMA_MINUS
    )
    alpha_zbar = (
        -0.5 * p.omega_zbar * SIGMA_0
        + (1j / (4 * p.gamma)) * emw * SIGMA_PLUS
        + (1j * p.lam / 4) * ew * SIGMA_MINUS
    )
    return alpha_z, alpha_zbar


def lax_real_part(p: LaxPoint, omega_y: float) -> np.ndarray:
    """alpha_x, the x-component of the connection along a horizontal boundary.

    Equals alpha_z + alpha_zbar when w_z = (w_x - i w_y)/2 with w real.
    """
    if p.lam == 0 or p.gamma == 0:
        raise ParameterDomainError("spectral and torsion parameters must be nonzero")
    ew = cmath.exp(p.omega)
    emw = cmath.exp(-p.omega)
    return (
        -0.5j * omega_y * SIGMA_0
        + (1j / (4 * p.lam) * ew + 1j / (4 * p.gamma) * emw) * SIGMA_PLUS
        + (1j * p.gamma / 4 * emw + 1j * p.lam / 4 * ew) * SIGMA_MINUS
    )


@dataclass(frozen=True)
class KMatrix:
    """Sklyanin's symmetric boundary matrix for one boundary component.

    K(lam, gam) = ((4 A gam - 4 B lam, lam/gam - gam/lam),
                   (lam/gam - gam/lam, 4 A/gam - 4 B/lam))

    A and B are the coefficients of the nonlinear boundary condition
    w_y = A e^w + B e^{-w} on that component.
    """

    A: object  # real scalar; Fraction in exact mode
    B: object

    def matrix(self, lam, gamma) -> np.ndarray:
        if lam == 0 or gamma == 0:
            raise ParameterDomainError("K-matrix needs nonzero lam, gamma")
        c = lam / gamma - gamma / lam
        k11 = 4 * self.A * gamma - 4 * self.B * lam
        k22 = 4 * self.A / gamma - 4 * self.B / lam
        exact = isinstance(c, Fraction) or isinstance(k11, Fraction)
        dtype = object if exact else complex
        return np.array([[k11, c], [c, k22]], dtype=dtype)

    def det(self, lam, gamma):
        m = self.matrix(lam, gamma)
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def k_matrix(km: KMatrix, lam, gamma) -> np.ndarray:
    return km.matrix(lam, gamma)


def k_det(km: KMatrix, lam, gamma):
    return km.det(lam, gamma)


def k_identities_check(km: KMatrix, lam, gamma) -> tuple:
    """Residuals of the three inversion identities of the K-matrix.

    Returns norms of
        K(1/lam, 1/gam) K(lam, gam) - D Id,
        conj(K(1/conj(lam), 1/conj(gam))) K(lam, gam) - D Id,
        D(lam, gam) - D(1/lam, 1/gam),
    all of which vanish identically (exact zeros over the rationals).
    """
    D = km.det(lam, gamma)
    if D == 0:
        raise SingularKMatrixError(f"det K = 0 at (lam, gamma) = ({lam}, {gamma})")
    K = km.matrix(lam, gamma)
    K_inv_args = km.matrix(1 / lam, 1 / gamma)
    r1 = K_inv_args @ K - D * _identity_like(K)
    Kc = km.matrix(1 / _conj(lam), 1 / _conj(gamma))
    Kc = np.array([[_conj(Kc[0][0]), _conj(Kc[0][1])], [_conj(Kc[1][0]), _conj(Kc[1][1])]],
                  dtype=Kc.dtype)
    r2 = Kc @ K - D * _identity_like(K)
    r3 = D - km.det(1 / lam, 1 / gamma)
    return matrix_norm(r1), matrix_norm(r2), abs(r3)


def _identity_like(K: np.ndarray) -> np.ndarray:
    one = Fraction(1) if K.dtype == object else 1.0
    zero = Fraction(0) if K.dtype == object else 0.0
    return np.array([[one, zero], [zero, one]], dtype=K.dtype)


def sklyanin_lax_residual(km: KMatrix, p: LaxPoint, omega_y: float) -> float:
    """Norm of K alpha_x(lam, gam) - alpha_x(1/lam, 1/gam) K at one boundary point.

    Vanishes exactly when w_y = A e^w + B e^{-w} there; in general the residual
    equals |w_y - A e^w - B e^{-w}| * |lam/gam - gam/lam| (the defect enters the
    off-diagonal entries with the K_12 factor).
    """
    K = km.matrix(p.lam, p.gamma)
    ax = lax_real_part(p, omega_y)
    p_inv = replace(p, lam=1 / p.lam, gamma=1 / p.gamma)
    ax_inv = lax_real_part(p_inv, omega_y)
    return matrix_norm(K @ ax - ax_inv @ K)


def gauge_transform(obj, gamma):
    """Rotate the torsion parameter onto gamma via the diagonal gauge.

    For a 2x2 matrix M evaluated at parameters (lam/gam, 1) this returns the
    matrix at (lam, gam): conjugation by diag(e^{-i theta}, e^{i theta}) with
    theta the principal half-argument of gam, so e^{2 i theta} = gam.  For a
    LaurentSeries with matrix coefficients the substitution lam -> lam/gam is
    applied as well (coefficient m picks up gam^{-m}).  gamma must lie on the
    unit circle; gamma = 1 is the identity map.
    """
    if abs(abs(gamma) - 1) > 1e-12:
        raise ParameterDomainError("gauge transform requires |gamma| = 1")
    theta = cmath.phase(gamma) / 2

    def conjugate(mat):
        phase = cmath.exp(2j * theta)
        out = np.array(mat, dtype=complex, copy=True)
        out[0, 1] = out[0, 1] / phase
        out[1, 0] = out[1, 0] * phase
        return out

    if isinstance(obj, LaurentSeries):
        if obj.is_zero():
            return obj
        coeffs = [
            conjugate(c) * gamma ** (-(int(obj.degree) + j))
            for j, c in enumerate(obj.coeffs)
        ]
        return LaurentSeries.make(obj.ring, int(obj.degree), coeffs, obj.truncation_order)
    return conjugate(obj)


def unit_circle_samples(n: int = 8, kms: tuple = (), gamma=1.0, tol: float = 1e-9) -> list:
    """Deterministic unit-circle spectral samples avoiding every det-K zero.

    Starts from the n-th roots of unity and refines to 2n-th, 4n-th, ... roots
    until n samples survive the |det K| > tol filter for every supplied KMatrix.
    """
    order = n
    while True:
        candidates = [cmath.exp(2j * cmath.pi * k / order) for k in range(order)]
        good = []
        for lam in candidates:
            if all(abs(km.det(lam, gamma)) > tol for km in kms):
                good.append(lam)
            if len(good) == n:
                return good
        order *= 2
        if order > 1024 * n:
            raise SingularKMatrixError("could not find unit-circle samples off det K = 0")


class Matrix2Ring:
    """Coefficient ring of complex 2x2 numpy matrices (for matrix Laurent series)."""

    name = "Mat2(CC)"

    def zero(self):
        return np.zeros((2, 2), dtype=complex)

    def one(self):
        return np.eye(2, dtype=complex)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        if np.isscalar(a):
            return a * b
        if np.isscalar(b):
            return a * b
        return a @ b

    def is_zero(self, a):
        if np.isscalar(a):
            return a == 0
        return bool(np.all(a == 0))


MAT2 = Matrix2Ring()
