"""Gauss sums, completed-square quadratic sums, and twisted Kloosterman sums.

The closed form verified here is

    sum_{x in F_q^d} chi(a|x|^2 + b.x) = G^d eta(a)^d chi(-|b|^2 / 4a),

with G = sum_x chi(x^2) and |G| = sqrt(q).  The twisted sums

    sum_{s != 0} eta(s)^n chi(a s + b / s)

cover the Kloosterman (n even, b != 0), Gauss (n odd, b = 0) and Salie
(n odd, b != 0) cases; for a != 0 all of them obey the Weil bound
|sum| <= 2 sqrt(q), which the audit asserts exhaustively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import domain
from .field import PrimeField, is_prime
from .fourier import chi_values
from .linalg import length_sq, vec_reduce


def gauss_sum(field: PrimeField) -> complex:
    """G = sum_x chi(x^2), by direct summation."""
    q = field.q
    res = (np.arange(q, dtype=np.int64) ** 2) % q
    return complex(chi_values(field, res).sum())


def quadratic_sum_closed_form(field: PrimeField, a: int, b, d: int | None = None) -> complex:
    """The completed-square value G^d eta(a)^d chi(-|b|^2 / 4a); a != 0."""
    q = field.q
    a %= q
    if a == 0:
        raise ValueError("the closed form requires a != 0")
    b = vec_reduce(b, q)
    if d is None:
        d = len(b)
    elif d != len(b):
        raise ValueError("d does not match the length of b")
    g = gauss_sum(field)
    arg = (-length_sq(field, b) * field.inv((4 * a) % q)) % q
    return (g ** d) * (field.eta(a) ** d) * field.chi(arg)


def quadratic_sum_bruteforce(field: PrimeField, a: int, b, d: int | None = None) -> complex:
    """Direct summation of chi(a|x|^2 + b.x) over the whole domain."""
    q = field.q
    b = vec_reduce(b, q)
    if d is None:
        d = len(b)
    phases = (a % q) * domain.lengths_vector(q, d).astype(np.int64)
    phases = (phases + domain.dots_with(q, d, b)) % q
    return complex(chi_values(field, phases).sum())


def twisted_kloosterman(field: PrimeField, n: int, a: int, b: int) -> complex:
    """sum_{s in F_q^*} eta(s)^n chi(a s + b / s), summed directly.

    Only the parity of n matters, and the implementation uses exactly
    n mod 2 so equal-parity twists return bit-identical values.  The Weil
    bound covers a != 0 only; the fully degenerate a = b = 0 even-twist
    case sums to q - 1 and is excluded from the audit.
    """
    q = field.q
    a %= q
    b %= q
    total = 0j
    if n % 2 == 0:
        for s in range(1, q):
            total += field.chi(a * s + b * field.inv(s))
    else:
        for s in range(1, q):
            total += field.eta(s) * field.chi(a * s + b * field.inv(s))
    return total


@dataclass
class WeilAuditRow:
    """Largest normalized twisted sum for one modulus."""

    q: int
    n: int
    a: int
    b: int
    abs_value: float
    ratio_to_sqrt_q: float
    passed: bool = True

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "a": self.a,
            "b": self.b,
            "abs_value": self.abs_value,
            "ratio_to_sqrt_q": self.ratio_to_sqrt_q,
            "pass": self.passed,
        }


def _twisted_table(field: PrimeField, n: int) -> np.ndarray:
    """All sums for a in F_q^*, b in F_q at once; rows a-1, columns b."""
    q = field.q
    s = np.arange(1, q, dtype=np.int64)
    inv_s = np.array([field.inv(int(x)) for x in s], dtype=np.int64)
    eta_s = np.array([field.eta(int(x)) for x in s], dtype=np.float64)
    a_col = np.arange(1, q, dtype=np.int64)[:, None]
    left = chi_values(field, a_col * s[None, :])
    if n % 2:
        left = left * eta_s[None, :]
    right = chi_values(field, inv_s[:, None] * np.arange(q, dtype=np.int64)[None, :])
    return left @ right


def weil_bound_audit(q_max: int, bound_constant: float = 2.0) -> list:
    """For every odd prime q <= q_max and both twist parities, record the
    maximal |sum| / sqrt(q) over a in F_q^*, b in F_q and check it stays
    under the bound constant."""
    if q_max > 500:
        raise ValueError("audit capped at q_max = 500")
    rows = []
    for q in range(3, q_max + 1, 2):
        if not is_prime(q):
            continue
        field = PrimeField(q)
        best = None
        for n in (0, 1):
            table = np.abs(_twisted_table(field, n))
            flat = int(np.argmax(table))
            a = flat // q + 1
            b = flat % q
            val = float(table[flat // q, flat % q])
            ratio = val / math.sqrt(q)
            if best is None or ratio > best.ratio_to_sqrt_q:
                best = WeilAuditRow(q, n, a, b, val, ratio, ratio <= bound_constant)
        rows.append(best)
    return rows
