"""Exact differential-polynomial algebra for sinh-Gordon Killing fields.

Coefficients of the matrix Laurent series are represented as exact polynomials
in the symbols

    e^{k*w}          (integer k),
    w_z, w_zz, ...   (pure d/dz derivatives of the conformal factor w),
    w_zb, w_zbzb, .. (pure d/dzbar derivatives),

with Gaussian-rational scalars tagged by a power of the imaginary unit and an
integer power of the torsion parameter gamma.  Mixed derivatives never appear:
every occurrence of w_{z zbar} is eliminated on sight through the sinh-Gordon
equation

    w_{z zbar} = -(1/16) e^{2w} + (1/16) e^{-2w},

which makes the rewriting confluent, so "this expression is zero" is decidable
by normalisation alone.  No floating point enters this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .series import CoefficientRing, LaurentSeries

#: A pure-derivative symbol: (a, b) encodes d_z^a d_zbar^b w with a*b == 0, a+b >= 1.
Deriv = tuple[int, int]


def _normalise_i(coeff: Fraction, i_power: int) -> tuple[Fraction, int]:
    """Fold i^2 = -1 into the rational coefficient; returns i_power in {0, 1}."""
    i_power %= 4
    if i_power >= 2:
        return -coeff, i_power - 2
    return coeff, i_power


@dataclass(frozen=True)
class DiffMonomial:
    """coeff * i^i_power * gamma^gamma_power * e^{exp_omega * w} * prod(derivs)."""

    coeff: Fraction
    i_power: int
    gamma_power: int
    exp_omega: int
    derivs: tuple[Deriv, ...]

    def key(self) -> tuple:
        return (self.i_power, self.gamma_power, self.exp_omega, self.derivs)

    def __post_init__(self):
        for a, b in self.derivs:
            if a * b != 0 or a + b < 1:
                raise ValueError(f"not a pure derivative symbol: {(a, b)}")


def _monomial(coeff, i_power=0, gamma_power=0, exp_omega=0, derivs=()) -> DiffMonomial:
    coeff = Fraction(coeff)
    coeff, i_power = _normalise_i(coeff, i_power)
    return DiffMonomial(coeff, i_power, gamma_power, exp_omega, tuple(sorted(derivs)))


def _mul_monomials(m1: DiffMonomial, m2: DiffMonomial) -> DiffMonomial:
    return _monomial(
        m1.coeff * m2.coeff,
        m1.i_power + m2.i_power,
        m1.gamma_power + m2.gamma_power,
        m1.exp_omega + m2.exp_omega,
        m1.derivs + m2.derivs,
    )


@dataclass(frozen=True)
class DiffPolynomial:
    """A canonically ordered sum of :class:`DiffMonomial` with distinct keys."""

    terms: tuple[DiffMonomial, ...]

    @classmethod
    def from_terms(cls, terms: Iterable[DiffMonomial]) -> "DiffPolynomial":
        merged: dict[tuple, Fraction] = {}
        for t in terms:
            k = t.key()
            merged[k] = merged.get(k, Fraction(0)) + t.coeff
        out = [
            DiffMonomial(c, *k)
            for k, c in merged.items()
            if c != 0
        ]
        out.sort(key=lambda t: t.key())
        return cls(tuple(out))

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls) -> "DiffPolynomial":
        return cls(())

    @classmethod
    def rational(cls, q) -> "DiffPolynomial":
        q = Fraction(q)
        if q == 0:
            return cls.zero()
        return cls((_monomial(q),))

    @classmethod
    def one(cls) -> "DiffPolynomial":
        return cls.rational(1)

    @classmethod
    def imaginary_unit(cls) -> "DiffPolynomial":
        return cls((_monomial(1, i_power=1),))

    @classmethod
    def gamma(cls, power: int = 1) -> "DiffPolynomial":
        return cls((_monomial(1, gamma_power=power),))

    @classmethod
    def exp_omega(cls, k: int) -> "DiffPolynomial":
        if k == 0:
            return cls.one()
        return cls((_monomial(1, exp_omega=k),))

    @classmethod
    def deriv(cls, a: int, b: int) -> "DiffPolynomial":
        return cls((_monomial(1, derivs=((a, b),)),))

    # -- ring operations --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "DiffPolynomial") -> "DiffPolynomial":
        return DiffPolynomial.from_terms(self.terms + other.terms)

    def __neg__(self) -> "DiffPolynomial":
        return DiffPolynomial(
            tuple(
                DiffMonomial(-t.coeff, t.i_power, t.gamma_power, t.exp_omega, t.derivs)
                for t in self.terms
            )
        )

    def __sub__(self, other: "DiffPolynomial") -> "DiffPolynomial":
        return self + (-other)

    def __mul__(self, other: "DiffPolynomial") -> "DiffPolynomial":
        return DiffPolynomial.from_terms(
            _mul_monomials(t1, t2) for t1 in self.terms for t2 in other.terms
        )

    def scale(self, q) -> "DiffPolynomial":
        q = Fraction(q)
        if q == 0:
            return DiffPolynomial.zero()
        return DiffPolynomial(
            tuple(
                DiffMonomial(q * t.coeff, t.i_power, t.gamma_power, t.exp_omega, t.derivs)
                for t in self.terms
            )
        )

    # -- calculus ----------------------------------------------------------------

    def differentiate(self, direction: str) -> "DiffPolynomial":
        """Formal total derivative, mixed derivatives reduced on creation."""
        return dp_differentiate(self, direction)

    # -- specialisation ------------------------------------------------------------

    def specialise_vacuum(self) -> "DiffPolynomial":
        """Exact substitution w == 0: derivatives vanish, exponentials become 1."""
        kept = [
            _monomial(t.coeff, t.i_power, t.gamma_power, 0, ())
            for t in self.terms
            if not t.derivs
        ]
        return DiffPolynomial.from_terms(kept)

    def max_derivative_order(self) -> int:
        orders = [a + b for t in self.terms for (a, b) in t.derivs]
        return max(orders, default=0)

    def evaluate(
        self,
        gamma,
        omega,
        deriv_values: Callable[[int, int], object],
    ):
        """Numeric evaluation: scalars or numpy arrays.

        ``omega`` is the grid of w values, ``deriv_values(a, b)`` returns the
        grid of d_z^a d_zbar^b w.
        """
        import numpy as np

        total = 0
        for t in self.terms:
            val = float(t.coeff) * (1j ** t.i_power) * (gamma ** t.gamma_power)
            if t.exp_omega != 0:
                val = val * np.exp(t.exp_omega * omega)
            for (a, b) in t.derivs:
                val = val * deriv_values(a, b)
            total = total + val
        if isinstance(total, int):
            total = total * np.ones_like(np.asarray(omega), dtype=complex)
        return total

    def __repr__(self) -> str:
        return f"DiffPolynomial({to_text(self)!r})"


# ------------------------------------------------------------------------------
# Differentiation with sinh-Gordon reduction
# ------------------------------------------------------------------------------

#: w_{z zbar} rewritten through the sinh-Gordon equation.
SINH_REDUCTION = DiffPolynomial.from_terms(
    [
        _monomial(Fraction(-1, 16), exp_omega=2),
        _monomial(Fraction(1, 16), exp_omega=-2),
    ]
)

_MIXED_ZBAR_OF_Z: dict[int, DiffPolynomial] = {}
_MIXED_Z_OF_ZBAR: dict[int, DiffPolynomial] = {}


def _zbar_of_pure_z(a: int) -> DiffPolynomial:
    """d_zbar applied to d_z^a w, reduced to pure derivatives and exponentials."""
    if a not in _MIXED_ZBAR_OF_Z:
        if a == 1:
            _MIXED_ZBAR_OF_Z[a] = SINH_REDUCTION
        else:
            _MIXED_ZBAR_OF_Z[a] = dp_differentiate(_zbar_of_pure_z(a - 1), "z")
    return _MIXED_ZBAR_OF_Z[a]


def _z_of_pure_zbar(b: int) -> DiffPolynomial:
    """d_z applied to d_zbar^b w, reduced to pure derivatives and exponentials."""
    if b not in _MIXED_Z_OF_ZBAR:
        if b == 1:
            _MIXED_Z_OF_ZBAR[b] = SINH_REDUCTION
        else:
            _MIXED_Z_OF_ZBAR[b] = dp_differentiate(_z_of_pure_zbar(b - 1), "zbar")
    return _MIXED_Z_OF_ZBAR[b]


def _deriv_of_symbol(sym: Deriv, direction: str) -> DiffPolynomial:
    a, b = sym
    if direction == "z":
        if b == 0:
            return DiffPolynomial.deriv(a + 1, 0)
        return _z_of_pure_zbar(b)
    if direction == "zbar":
        if a == 0:
            return DiffPolynomial.deriv(0, b + 1)
        return _zbar_of_pure_z(a)
    raise ValueError(f"unknown direction {direction!r}")


def dp_differentiate(p: DiffPolynomial, direction: str) -> DiffPolynomial:
    """Leibniz derivative of a differential polynomial.

    gamma and i are constants; e^{k w} contributes k * w_z (resp. w_zbar); each
    derivative symbol is bumped in its own direction or reduced via the
    sinh-Gordon equation when the bump would create a mixed derivative.
    """
    if direction not in ("z", "zbar"):
        raise ValueError(f"unknown direction {direction!r}")
    omega_first = (
        DiffPolynomial.deriv(1, 0) if direction == "z" else DiffPolynomial.deriv(0, 1)
    )
    out = DiffPolynomial.zero()
    for t in p.terms:
        base = DiffPolynomial((_monomial(t.coeff, t.i_power, t.gamma_power, t.exp_omega),))
        # Chain rule on the exponential factor.
        if t.exp_omega != 0:
            contrib = base.scale(t.exp_omega) * omega_first
            for sym in t.derivs:
                contrib = contrib * DiffPolynomial.deriv(*sym)
            out = out + contrib
        # Leibniz over derivative occurrences, grouped by multiplicity.
        seen: dict[Deriv, int] = {}
        for sym in t.derivs:
            seen[sym] = seen.get(sym, 0) + 1
        for sym, mult in seen.items():
            rest = list(t.derivs)
            rest.remove(sym)
            contrib = base.scale(mult) * _deriv_of_symbol(sym, direction)
            for other in rest:
                contrib = contrib * DiffPolynomial.deriv(*other)
            out = out + contrib
    return out


# ------------------------------------------------------------------------------
# The recursion producing the canonical Killing field
# ------------------------------------------------------------------------------

_I = DiffPolynomial.imaginary_unit()
_GAMMA_INV = DiffPolynomial.gamma(-1)
_GAMMA = DiffPolynomial.gamma(1)
_WZ = DiffPolynomial.deriv(1, 0)
_WZB = DiffPolynomial.deriv(0, 1)


@dataclass(frozen=True)
class SymbolicKillingField:
    """Exact coefficients (u_m, t_m, s_m) and auxiliaries psi_m, m = 0..order.

    The matrix coefficient of lambda^m is ((u_m, e^w t_m), (e^w s_m, -u_m)), so
    the field is trace-free by construction.
    """

    order: int
    u: tuple[DiffPolynomial, ...]
    psi: tuple[DiffPolynomial, ...]
    t: tuple[DiffPolynomial, ...]
    s: tuple[DiffPolynomial, ...]


_RECURSION_CACHE: dict[int, SymbolicKillingField] = {}


def _theta(u: list, psi: list, uz: list, p: int, q: int) -> DiffPolynomial:
    """theta_{p,q} = gamma u_p u_{q+1} + 4 u_{p,z} u_{q,z} + psi_p psi_q."""
    return _GAMMA * u[p] * u[q + 1] + uz[p].scale(4) * uz[q] + psi[p] * psi[q]


def ps_recursion(order: int) -> SymbolicKillingField:
    """Run the Pinkall-Sterling recursion exactly up to the given order.

    Normalisation: u_0 = 0, psi_0 = -1/2, which pins t_0 = 1/(2 gamma); negative
    indices are taken to be zero, giving s_0 = 0 and s_1 = e^{-2w}/2.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if order in _RECURSION_CACHE:
        return _RECURSION_CACHE[order]
    u = [DiffPolynomial.zero()]
    uz = [DiffPolynomial.zero()]
    psi = [DiffPolynomial.rational(Fraction(-1, 2))]
    for m in range(1, order + 1):
        # u_m = (1/gamma)(-4 u_{m-1,zz} + 4 i w_z psi_{m-1})
        u_prev_zz = dp_differentiate(uz[m - 1], "z")
        u_m = _GAMMA_INV * (u_prev_zz.scale(-4) + (_I * _WZ * psi[m - 1]).scale(4))
        u.append(u_m)
        uz.append(dp_differentiate(u_m, "z"))
        if m % 2 == 1:
            k = (m + 1) // 2
            val = _GAMMA * u[k] * u[k]
        else:
            k = m // 2
            val = _GAMMA * u[k] * u[k + 1] + _theta(u, psi, uz, k, k)
        for n in range(1, k):
            val = val + _theta(u, psi, uz, n, m - n).scale(2)
        psi.append(val)
    t = []
    s = []
    for m in range(order + 1):
        t.append(_GAMMA_INV * ((_I * uz[m]).scale(-2) - psi[m]))
        if m == 0:
            s.append(DiffPolynomial.zero())
        else:
            s.append(
                DiffPolynomial.exp_omega(-2)
                * ((_I * uz[m - 1]).scale(2) - psi[m - 1])
            )
    field = SymbolicKillingField(
        order=order,
        u=tuple(u[: order + 1]),
        psi=tuple(psi[: order + 1]),
        t=tuple(t),
        s=tuple(s),
    )
    _RECURSION_CACHE[order] = field
    return field


# ------------------------------------------------------------------------------
# Structure equations and the determinant
# ------------------------------------------------------------------------------

STRUCTURE_EQUATION_NAMES = ("RI", "RII", "RIII", "RIV", "RV", "RVI")


def structure_residual(
    name: str,
    m: int,
    u: Sequence[DiffPolynomial],
    t: Sequence[DiffPolynomial],
    s: Sequence[DiffPolynomial],
) -> DiffPolynomial:
    """One residual of the six coefficient equations equivalent to dPhi = [Phi, alpha].

    Out-of-range indices are the zero polynomial, matching the convention that
    the series starts at order zero and negative-index terms vanish.
    """
    zero = DiffPolynomial.zero()

    def at(seq, k):
        return seq[k] if 0 <= k < len(seq) else zero

    e2 = DiffPolynomial.exp_omega(2)
    ew = DiffPolynomial.exp_omega(1)
    emw = DiffPolynomial.exp_omega(-1)
    if name == "RI":
        return (
            dp_differentiate(at(u, m), "z").scale(4)
            + _I * e2 * at(s, m + 1)
            - _I * _GAMMA * at(t, m)
        )
    if name == "RII":
        return (
            dp_differentiate(at(u, m), "zbar").scale(4)
            + _I * _GAMMA_INV * at(s, m)
            - _I * e2 * at(t, m - 1)
        )
    if name == "RIII":
        return (
            (_WZ * at(t, m)).scale(4)
            + dp_differentiate(at(t, m), "z").scale(2)
            - _I * at(u, m + 1)
        )
    if name == "RIV":
        return (ew * dp_differentiate(at(t, m), "zbar")).scale(2) - _I * _GAMMA_INV * emw * at(u, m)
    if name == "RV":
        return (ew * dp_differentiate(at(s, m), "z")).scale(2) + _I * _GAMMA * emw * at(u, m)
    if name == "RVI":
        return (
            (_WZB * at(s, m)).scale(4)
            + dp_differentiate(at(s, m), "zbar").scale(2)
            + _I * at(u, m - 1)
        )
    raise ValueError(f"unknown structure equation {name!r}")


def verify_structure_eqs(field: SymbolicKillingField) -> list[tuple[str, int, DiffPolynomial]]:
    """All six residuals at every order m <= order - 1, normalised.

    Every residual must be the zero polynomial; a nonzero entry is returned as
    data for inspection, not raised.
    """
    out = []
    for m in range(field.order):
        for name in STRUCTURE_EQUATION_NAMES:
            out.append((name, m, structure_residual(name, m, field.u, field.t, field.s)))
    return out


class DiffPolyRing(CoefficientRing):
    """Coefficient-ring adapter so Laurent series can carry DiffPolynomial entries."""

    name = "DiffPoly"

    def zero(self):
        return DiffPolynomial.zero()

    def one(self):
        return DiffPolynomial.one()

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a.is_zero()


DIFF_POLY_RING = DiffPolyRing()


def det_series(field: SymbolicKillingField) -> LaurentSeries:
    """det Phi = -U^2 - e^{2w} S T as a lambda-series, truncated at order + 1.

    For the canonical field this must equal -lambda/(4 gamma) exactly on every
    retained coefficient.
    """
    n = field.order + 1
    ring = DIFF_POLY_RING
    U = LaurentSeries.make(ring, 0, list(field.u), n)
    S = LaurentSeries.make(ring, 0, list(field.s), n)
    T = LaurentSeries.make(ring, 0, list(field.t), n)
    e2 = LaurentSeries.make(ring, 0, [DiffPolynomial.exp_omega(2)])
    return -(U * U) - (e2 * S * T)


def expected_det() -> LaurentSeries:
    """The target value -lambda/(4 gamma) as a series over diff polynomials."""
    coeff = DiffPolynomial.gamma(-1).scale(Fraction(-1, 4))
    return LaurentSeries.make(DIFF_POLY_RING, 1, [coeff])


# ------------------------------------------------------------------------------
# Bivariate (lambda, gamma) view
# ------------------------------------------------------------------------------


@dataclass(frozen=True)
class BivariateKillingField:
    """Support pattern of the field as a series in lambda and gamma jointly.

    Writing the gamma = 1 coefficients (u_m, t_m, s_m), the general-torsion
    field is sum_m ((u_m, gamma^{-1} e^w t_m), (gamma e^w s_m, -u_m))
    (lambda/gamma)^m, so the only populated bivariate indices are

        u_{m,n} nonzero only for n = -m,
        t_{m,n} nonzero only for n = -m - 1,
        s_{m,n} nonzero only for n = -m + 1.
    """

    field: SymbolicKillingField

    def u(self, m: int, n: int) -> DiffPolynomial:
        if 0 <= m <= self.field.order and n == -m:
            return self.field.u[m]
        return DiffPolynomial.zero()

    def t(self, m: int, n: int) -> DiffPolynomial:
        if 0 <= m <= self.field.order and n == -m - 1:
            return self.field.t[m]
        return DiffPolynomial.zero()

    def s(self, m: int, n: int) -> DiffPolynomial:
        if 0 <= m <= self.field.order and n == -m + 1:
            return self.field.s[m]
        return DiffPolynomial.zero()

    def populated(self, kind: str) -> list[tuple[int, int]]:
        shift = {"u": 0, "t": -1, "s": 1}[kind]
        return [(m, -m + shift) for m in range(self.field.order + 1)]


def bivariate_expand(field: SymbolicKillingField) -> BivariateKillingField:
    return BivariateKillingField(field)


# ------------------------------------------------------------------------------
# Stable text form
# ------------------------------------------------------------------------------


def _deriv_name(sym: Deriv) -> str:
    a, b = sym
    if b == 0:
        return "w_" + "z" * a
    return "w_" + "zb" * b


def _monomial_text(t: DiffMonomial) -> str:
    parts = []
    if t.coeff == 1:
        coeff_txt = ""
    elif t.coeff == -1:
        coeff_txt = "-"
    else:
        coeff_txt = str(t.coeff)
    if t.i_power:
        parts.append("i")
    if t.gamma_power:
        parts.append(f"gamma^{t.gamma_power}" if t.gamma_power != 1 else "gamma")
    if t.exp_omega:
        parts.append(f"exp({t.exp_omega}w)" if t.exp_omega != 1 else "exp(w)")
    mult: dict[Deriv, int] = {}
    for sym in t.derivs:
        mult[sym] = mult.get(sym, 0) + 1
    for sym in sorted(mult):
        name = _deriv_name(sym)
        parts.append(name if mult[sym] == 1 else f"{name}^{mult[sym]}")
    if not parts:
        return str(t.coeff)
    body = "*".join(parts)
    if coeff_txt in ("", "-"):
        return coeff_txt + body
    return coeff_txt + "*" + body


def to_text(p: DiffPolynomial) -> str:
    """Deterministic, canonical-order text form used for golden files and the CLI."""
    if p.is_zero():
        return "0"
    return " + ".join(_monomial_text(t) for t in p.terms)


def field_to_text(field: SymbolicKillingField) -> str:
    lines = []
    for name, seq in (("u", field.u), ("psi", field.psi), ("t", field.t), ("s", field.s)):
        for m, poly in enumerate(seq):
            lines.append(f"{name}[{m}] = {to_text(poly)}")
    return "\n".join(lines) + "\n"
