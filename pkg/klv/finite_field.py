"""
Table-based arithmetic in finite fields of odd characteristic.

Elements of GF(p^k) are integers 0..p^k-1 whose base-p digits are the
coefficients (constant term first) of a polynomial modulo a monic
irreducible polynomial for which x is primitive.
"""
from itertools import product
from typing import List, Tuple
import logging

from sympy import factorint
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_rem

from config.settings import settings
from klv.errors import UnsupportedQ

logger = logging.getLogger(__name__)


def prime_power(q: int) -> Tuple[int, int]:
    """
    Split q = p^e for an odd prime p within the configured range.

    Raises:
        UnsupportedQ: q is even, not a prime power, or larger than max_q
    """
    factors = factorint(q) if q > 1 else {}
    if len(factors) != 1:
        raise UnsupportedQ(f"q={q} is not a prime power")
    (p, e), = factors.items()
    if p == 2:
        raise UnsupportedQ(f"q={q} has characteristic 2")
    if q > settings.fq.max_q:
        raise UnsupportedQ(f"q={q} exceeds max_q={settings.fq.max_q}")
    return int(p), int(e)


class FiniteField:
    """GF(p^k) with exp/log tables over a primitive element."""

    def __init__(self, p: int, k: int):
        self.p = p
        self.k = k
        self.order = p ** k
        self.modulus, self.exp = self._primitive_modulus()
        self.log = [0] * self.order
        for i, a in enumerate(self.exp[: self.order - 1]):
            self.log[a] = i
        self.exp = self.exp[: self.order - 1] * 2
        self._digits = [self._to_digits(a) for a in range(self.order)]
        self._add = [[self._from_digits([(x + y) % p for x, y in zip(da, db)]) for db in self._digits]
                     for da in self._digits]
        self._neg = [self._from_digits([(-x) % p for x in da]) for da in self._digits]
        logger.debug(f"GF({p}^{k}) built with modulus {self.modulus}")

    def _to_digits(self, a: int) -> List[int]:
        digits = []
        for _ in range(self.k):
            digits.append(a % self.p)
            a //= self.p
        return digits

    def _from_digits(self, digits: List[int]) -> int:
        return sum(int(c) * self.p ** i for i, c in enumerate(digits))

    def _poly_to_int(self, poly: List[int]) -> int:
        return self._from_digits([int(c) for c in reversed(poly)])

    def _primitive_modulus(self) -> Tuple[List[int], List[int]]:
        p, k = self.p, self.k
        x = [ZZ(1), ZZ(0)]
        for tail in product(range(p), repeat=k):
            modulus = [ZZ(1)] + [ZZ(c) for c in tail]
            if not gf_irreducible_p(modulus, p, ZZ):
                continue
            powers = [1]
            current = [ZZ(1)]
            while True:
                current = gf_rem(gf_mul(current, x, p, ZZ), modulus, p, ZZ)
                value = self._poly_to_int(current)
                if value in (0, 1):
                    break
                powers.append(value)
            if len(powers) == self.order - 1:
                return [int(c) for c in modulus], powers
        raise UnsupportedQ(f"No primitive modulus found for GF({p}^{k})")

    @property
    def primitive(self) -> int:
        return self.exp[1] if self.order > 2 else 1

    def elements(self) -> range:
        return range(self.order)

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.exp[(self.order - 1 - self.log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            return 0 if n > 0 else 1
        return self.exp[(self.log[a] * n) % (self.order - 1)]

    def from_int(self, n: int) -> int:
        """Image of an integer in the prime field."""
        return n % self.p

    def is_square(self, a: int) -> bool:
        return a == 0 or self.log[a] % 2 == 0


class QuadraticExtension(FiniteField):
    """GF(q^2) together with its subfield GF(q) and the Frobenius a -> a^q."""

    def __init__(self, q: int):
        p, e = prime_power(q)
        super().__init__(p, 2 * e)
        self.q = q
        self.base = [0] + [self.exp[i * (q + 1)] for i in range(q - 1)]

    def conj(self, a: int) -> int:
        return self.pow(a, self.q)

    def norm(self, a: int) -> int:
        return self.mul(a, self.conj(a))

    def trace(self, a: int) -> int:
        return self.add(a, self.conj(a))

    def in_base(self, a: int) -> bool:
        return self.conj(a) == a

    @property
    def base_primitive(self) -> int:
        """A generator of the multiplicative group of GF(q)."""
        return self.exp[self.q + 1]

    def trace_zero(self) -> List[int]:
        return [a for a in self.elements() if self.trace(a) == 0]
