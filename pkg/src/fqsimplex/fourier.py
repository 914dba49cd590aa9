"""Normalized Fourier analysis on F_q^d.

Conventions, fixed once and used by every asymptotic check downstream:

    average    E_x f(x)   = q^{-d} sum_x f(x)
    transform  fhat(xi)   = E_x f(x) chi(-xi.x)
    inversion  f(x)       = sum_xi fhat(xi) chi(xi.x)        (plain sum)
    Plancherel E_x f conj(g) = sum_xi fhat conj(ghat)
    convolution f*g(x)    = E_y f(y) g(x - y)

The transform factorizes over coordinates, so the production path applies a
length-q kernel along each axis (O(d q^{d+1})); a naive O(q^{2d}) transform
is kept as an oracle for small domains.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import domain
from .field import PrimeField

# The naive oracle materializes a q^d x q^d phase table.
NAIVE_CAP = 4096


@dataclass
class DenseFunction:
    """A complex-valued function on F_q^d as a flat array of length q^d."""

    q: int
    d: int
    values: np.ndarray

    def __post_init__(self):
        n = domain.domain_size(self.q, self.d)
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (n,):
            raise ValueError(f"expected {n} values, got shape {vals.shape}")
        self.values = vals

    @classmethod
    def constant(cls, q: int, d: int, value=1.0) -> "DenseFunction":
        n = domain.domain_size(q, d)
        return cls(q, d, np.full(n, value, dtype=np.complex128))

    @classmethod
    def zeros(cls, q: int, d: int) -> "DenseFunction":
        n = domain.domain_size(q, d)
        return cls(q, d, np.zeros(n, dtype=np.complex128))

    @classmethod
    def point_mass(cls, q: int, d: int, point=None, weight=1.0) -> "DenseFunction":
        f = cls.zeros(q, d)
        idx = 0 if point is None else domain.index_of(point, q)
        f.values[idx] = weight
        return f

    def grid(self) -> np.ndarray:
        return domain.as_grid(self.values, self.q, self.d)

    def copy(self) -> "DenseFunction":
        return DenseFunction(self.q, self.d, self.values.copy())

    def __call__(self, point) -> complex:
        return complex(self.values[domain.index_of(point, self.q)])


def _check_shapes(f: DenseFunction, g: DenseFunction):
    if (f.q, f.d) != (g.q, g.d):
        raise ValueError(f"shape mismatch: ({f.q},{f.d}) vs ({g.q},{g.d})")


@lru_cache(maxsize=None)
def _forward_kernel(q: int) -> np.ndarray:
    """K[t, x] = chi(-t x); one axis pass of the transform."""
    t = np.arange(q)
    k = np.exp(-2j * np.pi * np.outer(t, t) / q)
    k.flags.writeable = False
    return k


def average(f: DenseFunction) -> complex:
    return complex(f.values.mean())


def _apply_kernel_all_axes(f: DenseFunction, kernel: np.ndarray) -> np.ndarray:
    arr = f.grid()
    for axis in range(f.d):
        arr = np.moveaxis(np.tensordot(kernel, arr, axes=(1, axis)), 0, axis)
    return domain.as_flat(np.ascontiguousarray(arr))


def fourier_transform(f: DenseFunction) -> DenseFunction:
    """fhat(xi) = q^{-d} sum_x f(x) chi(-xi.x), computed axis by axis."""
    vals = _apply_kernel_all_axes(f, _forward_kernel(f.q)) * float(f.q) ** (-f.d)
    return DenseFunction(f.q, f.d, vals)


def fourier_transform_naive(f: DenseFunction) -> DenseFunction:
    """Direct double sum; the slow oracle the fast path is checked against."""
    n = f.values.shape[0]
    if n > NAIVE_CAP:
        raise ValueError(f"naive transform capped at {NAIVE_CAP} points")
    coords = domain.coords_matrix(f.q, f.d).astype(np.int64)
    phases = (coords @ coords.T) % f.q
    table = np.exp(-2j * np.pi * np.arange(f.q) / f.q)
    vals = (table[phases] @ f.values) * float(f.q) ** (-f.d)
    return DenseFunction(f.q, f.d, vals)


def inverse_transform(spectrum: DenseFunction) -> DenseFunction:
    """f(x) = sum_xi fhat(xi) chi(xi.x); inverts fourier_transform exactly."""
    vals = _apply_kernel_all_axes(spectrum, _forward_kernel(spectrum.q).conj())
    return DenseFunction(spectrum.q, spectrum.d, vals)


def convolve(f: DenseFunction, g: DenseFunction) -> DenseFunction:
    """f*g(x) = E_y f(y) g(x - y).

    Evaluated as a cyclic convolution through numpy's FFT, which is an
    implementation path independent of the kernel transforms above; the
    convolution theorem then holds as a genuine two-route identity.
    """
    _check_shapes(f, g)
    fg = np.fft.fftn(f.grid()) * np.fft.fftn(g.grid())
    conv = np.fft.ifftn(fg) * float(f.q) ** (-f.d)
    return DenseFunction(f.q, f.d, domain.as_flat(np.ascontiguousarray(conv)))


def plancherel_check(f: DenseFunction, g: DenseFunction) -> float:
    """|E_x f conj(g) - sum_xi fhat conj(ghat)|."""
    _check_shapes(f, g)
    lhs = (f.values * g.values.conj()).mean()
    fh = fourier_transform(f).values
    gh = fourier_transform(g).values
    rhs = (fh * gh.conj()).sum()
    return abs(lhs - rhs)


def translate(f: DenseFunction, y) -> DenseFunction:
    """g(x) = f(x + y)."""
    return DenseFunction(f.q, f.d, domain.translate_values(f.values, f.q, f.d, y))


def chi_values(field: PrimeField, residues: np.ndarray) -> np.ndarray:
    """chi applied entrywise to an integer residue array."""
    table = np.exp(2j * np.pi * np.arange(field.q) / field.q)
    return table[np.asarray(residues, dtype=np.int64) % field.q]
