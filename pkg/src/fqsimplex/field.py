"""Arithmetic in the prime field F_q for an odd prime q.

Field elements are plain Python ints reduced into [0, q).  A PrimeField
instance owns the modulus together with lookup tables for inverses, the
quadratic character eta (the Legendre symbol) and the canonical additive
character chi(a) = exp(2*pi*i*a/q).  All counting paths downstream stay in
exact integer arithmetic; only chi produces floating-point complex values.
"""

from __future__ import annotations

import cmath
import math

# Beyond this the lookup tables stop paying for themselves; audits never
# come close.
TABLE_LIMIT = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class PrimeField:
    """The field F_q, q an odd prime, with its standard characters.

    Instances are immutable after construction and safe to share across
    threads.
    """

    __slots__ = ("q", "_inv", "_eta", "_chi", "_sqrt", "_nonsquare")

    def __init__(self, q: int):
        if not isinstance(q, int) or not is_prime(q) or q == 2:
            raise ValueError(f"modulus must be an odd prime, got {q!r}")
        if q > TABLE_LIMIT:
            raise ValueError(f"modulus {q} exceeds table limit {TABLE_LIMIT}")
        self.q = q
        inv = [0] * q
        inv[1] = 1
        for s in range(2, q):
            # inv[s] = -(q // s) * inv[q % s] mod q, the standard recurrence
            inv[s] = (-(q // s) * inv[q % s]) % q
        self._inv = inv
        eta = [-1] * q
        eta[0] = 0
        sqrt = [None] * q
        sqrt[0] = 0
        for x in range(1, q):
            x2 = (x * x) % q
            eta[x2] = 1
            if sqrt[x2] is None:
                sqrt[x2] = x
        self._eta = eta
        self._sqrt = sqrt
        tau = 2.0 * math.pi / q
        self._chi = [cmath.exp(1j * tau * a) for a in range(q)]
        self._nonsquare = next(a for a in range(2, q) if eta[a] == -1)

    # -- ring operations ----------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def neg(self, a: int) -> int:
        return (-a) % self.q

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return (a * self.inv(b)) % self.q

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.q)
        return pow(a % self.q, e, self.q)

    # -- characters ----------------------------------------------------------

    def eta(self, a: int) -> int:
        """Quadratic character: 0 at 0, +1 on nonzero squares, -1 otherwise."""
        return self._eta[a % self.q]

    def chi(self, a: int) -> complex:
        """Canonical additive character exp(2*pi*i*a/q)."""
        return self._chi[a % self.q]

    def sqrt(self, a: int):
        """A square root of a, or None when a is a nonresidue."""
        return self._sqrt[a % self.q]

    def sqrt_of_minus_one(self):
        """An element i with i*i = -1; exists exactly when q = 1 mod 4."""
        return self._sqrt[self.q - 1]

    def nonsquare(self) -> int:
        """The smallest quadratic nonresidue."""
        return self._nonsquare

    # -- iteration and misc ---------------------------------------------------

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("PrimeField", self.q))

    def __repr__(self) -> str:
        return f"PrimeField({self.q})"
