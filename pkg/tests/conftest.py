import itertools
import os
import sys
from pathlib import Path

# Allow running from a bare checkout: fall back to src/ and propagate it to
# subprocess-based CLI tests.
try:
    import fqsimplex  # noqa: F401
except ImportError:
    _SRC = str(Path(__file__).resolve().parent.parent / "src")
    sys.path.insert(0, _SRC)
    os.environ["PYTHONPATH"] = _SRC + os.pathsep + os.environ.get("PYTHONPATH", "")

import numpy as np
import pytest

from fqsimplex import domain
from fqsimplex.counting import PointSet
from fqsimplex.field import PrimeField, is_prime
from fqsimplex.linalg import Simplex, gram_matrix, make_simplex, matrix_rank

PRIMES_TO_101 = [p for p in range(3, 102, 2) if is_prime(p)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def all_points(q, d):
    return [domain.point_of(i, q, d) for i in range(q ** d)]


def standard_simplex(field, d, k):
    pts = [(0,) * d]
    for j in range(k):
        e = [0] * d
        e[j] = 1
        pts.append(tuple(e))
    return make_simplex(field, pts)


def naive_embedding_count(field, A: PointSet, simplex: Simplex) -> int:
    """Quadruple-loop oracle: every tuple (x, y_1..y_k) with independent y's,
    all vertices inside A and the translated tuple Gram-equal to the
    reference.  Deliberately ignorant of the support enumeration."""
    q, d, k = A.q, A.d, simplex.k
    pts = all_points(q, d)
    ref = gram_matrix(field, simplex)
    zero = (0,) * d
    count = 0
    for ys in itertools.product(pts, repeat=k):
        if matrix_rank(field, list(ys)) != k:
            continue
        if gram_matrix(field, Simplex(q, (zero,) + ys)) != ref:
            continue
        for x in pts:
            if not A.mask[domain.index_of(x, q)]:
                continue
            if all(A.mask[domain.index_of(tuple((a + b) % q for a, b in zip(x, y)), q)] for y in ys):
                count += 1
    return count


def random_valid_simplex(field, d, k, rng) -> Simplex:
    q = field.q
    while True:
        pts = [tuple(int(rng.integers(q)) for _ in range(d)) for _ in range(k + 1)]
        s = Simplex(q, tuple(pts))
        if matrix_rank(field, list(s.diffs())) == k:
            return s
