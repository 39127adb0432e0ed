"""
Exact Laurent polynomials in one variable u with integer coefficients.

The ring Z[u, u^-1] carries the bar involution u -> u^-1. Values are
immutable; arithmetic never rounds and Python integers never overflow.
"""
from fractions import Fraction
from typing import Dict, Iterator, Mapping, Optional, Tuple, Union
import re

import sympy

from klv.errors import NotDivisible, NotLaurent

# the polynomial variable as a sympy symbol, shared by every solver
U_SYMBOL = sympy.Symbol("u")

_TERM = re.compile(r"\s*([+-])?\s*(\d+)?\s*(u(?:\^(-?\d+))?)?")

Coercible = Union["LaurentPoly", int]


class LaurentPoly:
    """An element of Z[u, u^-1], stored as {exponent: nonzero coefficient}."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Optional[Mapping[int, int]] = None):
        self._coeffs: Dict[int, int] = {
            int(k): int(c) for k, c in (coeffs or {}).items() if c != 0
        }

    # construction

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "LaurentPoly":
        """Return c * u^k."""
        return cls({k: c})

    @classmethod
    def coerce(cls, value: Coercible) -> "LaurentPoly":
        if isinstance(value, LaurentPoly):
            return value
        if isinstance(value, int):
            return cls.const(value)
        raise TypeError(f"Cannot coerce {type(value).__name__} to LaurentPoly")

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        """
        Parse the canonical text form, e.g. "u^2+u+1", "u^-2-1", "-1".

        Coefficients may precede the variable ("2u^3"); the typographic
        minus sign is accepted.
        """
        text = text.strip().replace("−", "-")
        if text in ("", "0"):
            return cls()
        coeffs: Dict[int, int] = {}
        pos = 0
        while pos < len(text):
            match = _TERM.match(text, pos)
            if match is None or match.end() == pos or (match.group(2) is None and match.group(3) is None):
                raise ValueError(f"Cannot parse Laurent polynomial: {text!r}")
            if pos > 0 and match.group(1) is None:
                raise ValueError(f"Missing sign between terms in {text!r}")
            sign = -1 if match.group(1) == "-" else 1
            coefficient = int(match.group(2)) if match.group(2) else 1
            if match.group(3) is None:
                exponent = 0
            else:
                exponent = int(match.group(4)) if match.group(4) else 1
            coeffs[exponent] = coeffs.get(exponent, 0) + sign * coefficient
            pos = match.end()
        return cls(coeffs)

    # inspection

    def __getitem__(self, k: int) -> int:
        return self._coeffs.get(k, 0)

    def items(self) -> Iterator[Tuple[int, int]]:
        """Terms in decreasing exponent order."""
        for k in sorted(self._coeffs, reverse=True):
            yield k, self._coeffs[k]

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def degree(self) -> int:
        if not self._coeffs:
            raise ValueError("The zero polynomial has no degree")
        return max(self._coeffs)

    def min_degree(self) -> int:
        if not self._coeffs:
            raise ValueError("The zero polynomial has no degree")
        return min(self._coeffs)

    def is_polynomial(self) -> bool:
        """True when no negative exponent occurs (element of Z[u])."""
        return all(k >= 0 for k in self._coeffs)

    def is_monomial(self) -> bool:
        return len(self._coeffs) == 1

    # ring operations

    def __add__(self, other: Coercible) -> "LaurentPoly":
        if not isinstance(other, (LaurentPoly, int)):
            return NotImplemented
        other = LaurentPoly.coerce(other)
        result = dict(self._coeffs)
        for k, c in other._coeffs.items():
            result[k] = result.get(k, 0) + c
        return LaurentPoly(result)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other: Coercible) -> "LaurentPoly":
        if not isinstance(other, (LaurentPoly, int)):
            return NotImplemented
        return self + (-LaurentPoly.coerce(other))

    def __rsub__(self, other: Coercible) -> "LaurentPoly":
        if not isinstance(other, (LaurentPoly, int)):
            return NotImplemented
        return LaurentPoly.coerce(other) + (-self)

    def __mul__(self, other: Coercible) -> "LaurentPoly":
        if not isinstance(other, (LaurentPoly, int)):
            return NotImplemented
        other = LaurentPoly.coerce(other)
        result: Dict[int, int] = {}
        for k1, c1 in self._coeffs.items():
            for k2, c2 in other._coeffs.items():
                result[k1 + k2] = result.get(k1 + k2, 0) + c1 * c2
        return LaurentPoly(result)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if not self.is_monomial():
                raise NotDivisible(f"{self} is not a unit of Z[u, u^-1]")
            (k, c), = self._coeffs.items()
            if c not in (1, -1):
                raise NotDivisible(f"{self} is not a unit of Z[u, u^-1]")
            return LaurentPoly({k * n: c ** (-n)})
        result = LaurentPoly.const(1)
        for _ in range(n):
            result = result * self
        return result

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by u^k."""
        return LaurentPoly({e + k: c for e, c in self._coeffs.items()})

    def bar(self) -> "LaurentPoly":
        """The involution u -> u^-1."""
        return LaurentPoly({-k: c for k, c in self._coeffs.items()})

    def exact_div(self, divisor: Coercible) -> "LaurentPoly":
        """
        Long division from the top exponent.

        Raises:
            NotDivisible: the remainder is nonzero
            ZeroDivisionError: divisor is zero
        """
        divisor = LaurentPoly.coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("Division by the zero Laurent polynomial")
        if self.is_zero():
            return LaurentPoly()
        top, lead = divisor.degree(), divisor[divisor.degree()]
        floor = self.min_degree() - divisor.min_degree()
        remainder = dict(self._coeffs)
        quotient: Dict[int, int] = {}
        while remainder:
            high = max(remainder)
            k = high - top
            c = remainder[high]
            if k < floor or c % lead != 0:
                raise NotDivisible(f"({self}) is not divisible by ({divisor})")
            factor = c // lead
            quotient[k] = factor
            for e, d in divisor._coeffs.items():
                value = remainder.get(e + k, 0) - factor * d
                if value:
                    remainder[e + k] = value
                else:
                    remainder.pop(e + k, None)
        return LaurentPoly(quotient)

    def eval_int(self, q: Union[int, Fraction]) -> Fraction:
        """Exact value at u = q (a Fraction when negative exponents occur)."""
        if q == 0:
            raise ValueError("Laurent polynomials are evaluated at nonzero values only")
        base = Fraction(q)
        return sum((c * base ** k for k, c in self._coeffs.items()), Fraction(0))

    # comparison and text

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self._coeffs.items()))

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for index, (k, c) in enumerate(self.items()):
            if k == 0:
                body = str(abs(c))
            else:
                mono = "u" if k == 1 else f"u^{k}"
                body = (str(abs(c)) if abs(c) != 1 else "") + mono
            if c < 0:
                parts.append("-" + body)
            else:
                parts.append(body if index == 0 else "+" + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"LaurentPoly({str(self)!r})"

    # sympy bridge

    def to_sympy(self) -> sympy.Expr:
        return sympy.Add(*[c * U_SYMBOL ** k for k, c in self._coeffs.items()])

    @classmethod
    def from_sympy(cls, expr) -> "LaurentPoly":
        """
        Convert a rational function of u into a Laurent polynomial.

        Raises:
            NotLaurent: the denominator is not a monomial, or coefficients are not integers
        """
        expr = sympy.cancel(sympy.together(sympy.sympify(expr)))
        numerator, denominator = sympy.fraction(expr)
        den_terms = sympy.Poly(denominator, U_SYMBOL).terms()
        if len(den_terms) != 1:
            raise NotLaurent(f"Denominator of {expr} is not a monomial")
        (shift,), den_coeff = den_terms[0]
        coeffs: Dict[int, int] = {}
        for (k,), c in sympy.Poly(numerator, U_SYMBOL).terms():
            value = sympy.Rational(c) / sympy.Rational(den_coeff)
            if value.q != 1:
                raise NotLaurent(f"Non-integer coefficient {value} in {expr}")
            coeffs[k - shift] = int(value.p)
        return cls(coeffs)


# the variable u itself
U = LaurentPoly.monomial(1)
ZERO = LaurentPoly()
ONE = LaurentPoly.const(1)


def u_pow(k: int) -> LaurentPoly:
    """Return u^k."""
    return LaurentPoly.monomial(k)


def lp_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def lp_bar(a: LaurentPoly) -> LaurentPoly:
    return a.bar()


def lp_exact_div(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a.exact_div(b)


def lp_eval_int(a: LaurentPoly, q: int) -> Fraction:
    return a.eval_int(q)
