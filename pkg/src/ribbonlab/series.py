"""Truncated Laurent series and Laurent polynomials over a pluggable coefficient ring.

A truncated Laurent series keeps an explicit ``truncation_order``: coefficients
at exponents >= truncation_order are *unknown*, not zero.  All arithmetic
propagates the truncation so that no operation can ever report a coefficient it
does not actually know.  The zero series carries the distinguished degree
``INFINITE_DEGREE`` and an empty coefficient tuple.

Coefficient rings are plain objects implementing the small interface of
:class:`CoefficientRing`; the same series engine then serves exact rationals,
complex scalars, differential polynomials and grid-valued functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

#: Degree of the zero series, and bidegree entries of the zero polynomial.
INFINITE_DEGREE = math.inf


class RingMismatchError(TypeError):
    """Two operands live over different coefficient rings."""


class NotInvertibleError(ArithmeticError):
    """The series has no inverse in the truncated model (e.g. the zero series)."""


class CoefficientRing:
    """Interface a coefficient ring must provide.

    ``invert`` is optional; rings that are not fields may leave the default,
    which raises :class:`NotInvertibleError`.
    """

    name = "ring"

    def zero(self) -> Any:
        raise NotImplementedError

    def one(self) -> Any:
        raise NotImplementedError

    def add(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def neg(self, a: Any) -> Any:
        raise NotImplementedError

    def mul(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def is_zero(self, a: Any) -> bool:
        raise NotImplementedError

    def invert(self, a: Any) -> Any:
        raise NotInvertibleError(f"ring {self.name!r} does not support inversion")

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"<{type(self).__name__} {self.name}>"


class NumberRing(CoefficientRing):
    """Ring of plain Python numbers (Fraction, int, float, complex)."""

    def __init__(self, name: str, zero: Any, one: Any):
        self.name = name
        self._zero = zero
        self._one = one

    def zero(self):
        return self._zero

    def one(self):
        return self._one

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def invert(self, a):
        if a == 0:
            raise NotInvertibleError("division by zero in coefficient ring")
        if isinstance(a, Fraction) or isinstance(a, int):
            return Fraction(1) / Fraction(a)
        return 1 / a


#: Exact rationals.
QQ = NumberRing("QQ", Fraction(0), Fraction(1))
#: Complex floating scalars.
CC = NumberRing("CC", 0j, 1 + 0j)


def _check_rings(a: "LaurentSeries", b: "LaurentSeries") -> None:
    if a.ring is not b.ring:
        raise RingMismatchError(
            f"cannot combine series over {a.ring.name!r} and {b.ring.name!r}"
        )


@dataclass(frozen=True)
class LaurentSeries:
    """A truncated formal Laurent series ``sum_{k>=degree} c_k lambda^k``.

    ``coeffs[j]`` is the coefficient of ``lambda^(degree + j)``.  Exponents in
    ``[degree + len(coeffs), truncation_order)`` are known to be zero; exponents
    ``>= truncation_order`` are unknown.  The zero series has
    ``degree == INFINITE_DEGREE`` and no coefficients (but may still carry a
    finite truncation order, meaning "zero as far as it is known").
    """

    ring: CoefficientRing
    degree: float  # int, or INFINITE_DEGREE for the zero series
    coeffs: tuple
    truncation_order: float  # int, or INFINITE_DEGREE for exact series

    @classmethod
    def make(
        cls,
        ring: CoefficientRing,
        degree: int,
        coeffs: Sequence[Any],
        truncation_order: float = INFINITE_DEGREE,
    ) -> "LaurentSeries":
        """Build a series, normalising leading/trailing zeros and truncation."""
        coeffs = list(coeffs)
        # Drop anything at or above the truncation order.
        if truncation_order != INFINITE_DEGREE:
            keep = int(truncation_order) - degree
            if keep < len(coeffs):
                coeffs = coeffs[: max(keep, 0)]
        while coeffs and ring.is_zero(coeffs[0]):
            coeffs.pop(0)
            degree += 1
        while coeffs and ring.is_zero(coeffs[-1]):
            coeffs.pop()
        if not coeffs:
            return cls(ring, INFINITE_DEGREE, (), truncation_order)
        if degree > truncation_order:
            return cls(ring, INFINITE_DEGREE, (), truncation_order)
        return cls(ring, degree, tuple(coeffs), truncation_order)

    @classmethod
    def zero(cls, ring: CoefficientRing, truncation_order: float = INFINITE_DEGREE):
        return cls(ring, INFINITE_DEGREE, (), truncation_order)

    @classmethod
    def one(cls, ring: CoefficientRing, truncation_order: float = INFINITE_DEGREE):
        return cls.make(ring, 0, [ring.one()], truncation_order)

    @classmethod
    def monomial(
        cls,
        ring: CoefficientRing,
        exponent: int,
        coeff: Any = None,
        truncation_order: float = INFINITE_DEGREE,
    ):
        c = ring.one() if coeff is None else coeff
        return cls.make(ring, exponent, [c], truncation_order)

    @classmethod
    def from_dict(
        cls,
        ring: CoefficientRing,
        data: dict,
        truncation_order: float = INFINITE_DEGREE,
    ):
        if not data:
            return cls.zero(ring, truncation_order)
        lo = min(data)
        hi = max(data)
        coeffs = [data.get(k, ring.zero()) for k in range(lo, hi + 1)]
        return cls.make(ring, lo, coeffs, truncation_order)

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        """True when no nonzero coefficient is known (up to the truncation)."""
        return not self.coeffs

    def coefficient(self, exponent: int) -> Any:
        """Coefficient of ``lambda^exponent``; raises past the truncation order."""
        if exponent >= self.truncation_order:
            raise IndexError(
                f"coefficient at exponent {exponent} is beyond the truncation "
                f"order {self.truncation_order}"
            )
        if self.is_zero():
            return self.ring.zero()
        j = exponent - int(self.degree)
        if j < 0 or j >= len(self.coeffs):
            return self.ring.zero()
        return self.coeffs[j]

    def known_exponents(self) -> range:
        """Exponent range carrying stored coefficients."""
        if self.is_zero():
            return range(0)
        d = int(self.degree)
        return range(d, d + len(self.coeffs))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        _check_rings(self, other)
        ring = self.ring
        trunc = min(self.truncation_order, other.truncation_order)
        if self.is_zero():
            return LaurentSeries.make(
                ring, int(other.degree) if not other.is_zero() else 0,
                other.coeffs, trunc)
        if other.is_zero():
            return LaurentSeries.make(ring, int(self.degree), self.coeffs, trunc)
        lo = int(min(self.degree, other.degree))
        hi = int(max(self.degree + len(self.coeffs), other.degree + len(other.coeffs)))
        coeffs = []
        for k in range(lo, hi):
            a = self.coefficient(k) if k < self.truncation_order else ring.zero()
            b = other.coefficient(k) if k < other.truncation_order else ring.zero()
            coeffs.append(ring.add(a, b))
        return LaurentSeries.make(ring, lo, coeffs, trunc)

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(
            self.ring,
            self.degree,
            tuple(self.ring.neg(c) for c in self.coeffs),
            self.truncation_order,
        )

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        _check_rings(self, other)
        ring = self.ring
        if self.is_zero() or other.is_zero():
            # An unknown tail times a series of degree d only pollutes
            # exponents >= trunc + d.
            trunc = min(
                self.truncation_order + (other.degree if not other.is_zero() else 0),
                other.truncation_order + (self.degree if not self.is_zero() else 0),
            )
            return LaurentSeries.zero(ring, trunc)
        trunc = min(
            self.truncation_order + other.degree,
            other.truncation_order + self.degree,
        )
        lo = int(self.degree + other.degree)
        if trunc == INFINITE_DEGREE:
            hi = int(self.degree + len(self.coeffs) + other.degree + len(other.coeffs)) - 1
        else:
            hi = int(trunc) - 1
        out = {}
        for ja, ca in enumerate(self.coeffs):
            ea = int(self.degree) + ja
            for jb, cb in enumerate(other.coeffs):
                k = ea + int(other.degree) + jb
                if k > hi:
                    continue
                prod = ring.mul(ca, cb)
                if k in out:
                    out[k] = ring.add(out[k], prod)
                else:
                    out[k] = prod
        coeffs = [out.get(k, ring.zero()) for k in range(lo, hi + 1)]
        return LaurentSeries.make(ring, lo, coeffs, trunc)

    def scale(self, c: Any) -> "LaurentSeries":
        """Multiply every coefficient by a fixed ring element."""
        ring = self.ring
        return LaurentSeries.make(
            ring,
            int(self.degree) if not self.is_zero() else 0,
            [ring.mul(c, x) for x in self.coeffs],
            self.truncation_order,
        )

    def truncate(self, n: int) -> "LaurentSeries":
        """Drop exponents > n; the result has truncation order n + 1."""
        trunc = min(self.truncation_order, n + 1)
        if self.is_zero():
            return LaurentSeries.zero(self.ring, trunc)
        return LaurentSeries.make(self.ring, int(self.degree), self.coeffs, trunc)

    def invert(self, order: float | None = None) -> "LaurentSeries":
        """Multiplicative inverse up to truncation.

        ``order`` is the truncation order of the result; by default the
        relative accuracy of the input is preserved.  Requires an invertible
        (field) coefficient ring and a nonzero series.
        """
        if self.is_zero():
            raise NotInvertibleError("the zero series is not invertible")
        ring = self.ring
        d = int(self.degree)
        if order is None:
            order = (
                INFINITE_DEGREE
                if self.truncation_order == INFINITE_DEGREE
                else self.truncation_order - 2 * d
            )
        if order == INFINITE_DEGREE:
            # A genuine inverse of an untruncated series is generally infinite;
            # keep the window matching the known coefficients.
            order = -d + len(self.coeffs)
        order = int(order)
        lead_inv = ring.invert(self.coeffs[0])
        # b has degree -d; solve sum_{i+j=m} a_i b_j = [m == 0] coefficient-wise.
        bcoeffs = [lead_inv]
        for j in range(1, order + d):
            acc = ring.zero()
            for i in range(1, min(j, len(self.coeffs) - 1) + 1):
                acc = ring.add(acc, ring.mul(self.coeffs[i], bcoeffs[j - i]))
            bcoeffs.append(ring.neg(ring.mul(lead_inv, acc)))
        return LaurentSeries.make(ring, -d, bcoeffs, order)

    def agrees_with(self, other: "LaurentSeries", through: int | None = None) -> bool:
        """Coefficient-wise agreement on the common known window (tests helper)."""
        _check_rings(self, other)
        hi = min(self.truncation_order, other.truncation_order)
        if through is not None:
            hi = min(hi, through + 1)
        if hi == INFINITE_DEGREE:
            lo_candidates = [d for d in (self.degree, other.degree) if d != INFINITE_DEGREE]
            if not lo_candidates:
                return True
            lo = int(min(lo_candidates))
            hi = max(
                (int(s.degree) + len(s.coeffs) for s in (self, other) if not s.is_zero()),
                default=lo,
            )
        else:
            lo_candidates = [d for d in (self.degree, other.degree) if d != INFINITE_DEGREE]
            lo = int(min(lo_candidates)) if lo_candidates else 0
            hi = int(hi)
        for k in range(lo, hi):
            a = self.coefficient(k)
            b = other.coefficient(k)
            if not self.ring.is_zero(self.ring.add(a, self.ring.neg(b))):
                return False
        return True

    def __repr__(self) -> str:
        if self.is_zero():
            return f"LaurentSeries(0; trunc={self.truncation_order})"
        parts = [
            f"({c!r})*L^{int(self.degree) + j}" for j, c in enumerate(self.coeffs)
        ]
        return " + ".join(parts) + f" + O(L^{self.truncation_order})"


def ls_add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    return a + b


def ls_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    return a * b


def ls_invert(a: LaurentSeries, order: float | None = None) -> LaurentSeries:
    return a.invert(order)


def ls_truncate(a: LaurentSeries, n: int) -> LaurentSeries:
    return a.truncate(n)


def ls_degree(a: LaurentSeries) -> float:
    return a.degree


@dataclass(frozen=True)
class LaurentPolynomial:
    """A Laurent polynomial with dense coefficients ``coeffs[j]`` of ``lambda^(lo+j)``.

    Coefficients are plain numbers (int, float, Fraction, complex).  The zero
    polynomial has bidegree ``(INFINITE_DEGREE, INFINITE_DEGREE)`` and an empty
    coefficient tuple.
    """

    lo: float
    hi: float
    coeffs: tuple

    @classmethod
    def make(cls, lo: int, coeffs: Sequence[Any]) -> "LaurentPolynomial":
        coeffs = list(coeffs)
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
            lo += 1
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            return cls(INFINITE_DEGREE, INFINITE_DEGREE, ())
        return cls(lo, lo + len(coeffs) - 1, tuple(coeffs))

    @classmethod
    def zero(cls) -> "LaurentPolynomial":
        return cls(INFINITE_DEGREE, INFINITE_DEGREE, ())

    @classmethod
    def from_dict(cls, data: dict) -> "LaurentPolynomial":
        if not data:
            return cls.zero()
        lo = min(data)
        hi = max(data)
        return cls.make(lo, [data.get(k, 0) for k in range(lo, hi + 1)])

    def is_zero(self) -> bool:
        return not self.coeffs

    def bidegree(self) -> tuple:
        return (self.lo, self.hi)

    def coefficient(self, exponent: int) -> Any:
        if self.is_zero():
            return 0
        j = exponent - int(self.lo)
        if j < 0 or j >= len(self.coeffs):
            return 0
        return self.coeffs[j]

    def to_dict(self) -> dict:
        if self.is_zero():
            return {}
        return {int(self.lo) + j: c for j, c in enumerate(self.coeffs) if c != 0}

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        data = self.to_dict()
        for k, v in other.to_dict().items():
            data[k] = data.get(k, 0) + v
        return LaurentPolynomial.from_dict(data)

    def __neg__(self) -> "LaurentPolynomial":
        if self.is_zero():
            return self
        return LaurentPolynomial(self.lo, self.hi, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out: dict = {}
        for ka, ca in self.to_dict().items():
            for kb, cb in other.to_dict().items():
                k = ka + kb
                out[k] = out.get(k, 0) + ca * cb
        return LaurentPolynomial.from_dict(out)

    def scale(self, c: Any) -> "LaurentPolynomial":
        if self.is_zero() or c == 0:
            return LaurentPolynomial.zero()
        return LaurentPolynomial.make(int(self.lo), [c * x for x in self.coeffs])

    def shift(self, k: int) -> "LaurentPolynomial":
        """Multiply by lambda^k."""
        if self.is_zero():
            return self
        return LaurentPolynomial(self.lo + k, self.hi + k, self.coeffs)

    def evaluate(self, x: Any) -> Any:
        if self.is_zero():
            return 0
        return sum(c * x ** (int(self.lo) + j) for j, c in enumerate(self.coeffs))

    def __repr__(self) -> str:
        if self.is_zero():
            return "LaurentPolynomial(0)"
        parts = [f"({c!r})*L^{int(self.lo) + j}" for j, c in enumerate(self.coeffs)]
        return " + ".join(parts)


def lp_bidegree(p: LaurentPolynomial) -> tuple:
    return p.bidegree()
