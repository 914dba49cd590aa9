"""Counting isometric simplex copies inside subsets of F_q^d.

The central objects are the weighted tuple sums

    S_j(y_1..y_j)        product of the j step-measure weights
    script_S(f_0..f_j)   q^{-jd} sum over independent gram-matching tuples
                         of q^binom(j+1,2) E_x f_0(x) prod f_i(x + y_i)

For indicator inputs 1_A the normalized sum encodes the number of ordered
embeddings of the reference simplex in A:

    exact_count = q^{(k+1)d - binom(k+1,2)} * script_S(1_A, ..., 1_A)

which the code verifies as an exact integer identity along two aggregation
paths.  Enumeration never sweeps all q^{kd} tuples: level l candidates are
read off vectorized dot-product masks, so the work scales with the support
size q^{jd - binom(j+1,2)} plus O(q^d) per node.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import domain
from .field import PrimeField
from .fourier import DenseFunction, fourier_transform
from .linalg import (
    Simplex,
    gram_matrix,
    matrix_rank,
    prefix_simplex,
    simplex_is_valid,
    simplex_rank,
    span_elements,
    subspace_span,
)
from .measures import (
    build_conditional,
    check_anchors,
    conditional_value,
    span_mask,
    step_targets,
)

STARRED_ENUM_CAP = 1_000_000


# ---------------------------------------------------------------------------
# point sets
# ---------------------------------------------------------------------------

@dataclass
class PointSet:
    """A subset of F_q^d stored as a boolean membership array."""

    q: int
    d: int
    mask: np.ndarray

    def __post_init__(self):
        n = domain.domain_size(self.q, self.d)
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != (n,):
            raise ValueError(f"expected mask of length {n}")
        self.mask = mask

    @classmethod
    def full(cls, q: int, d: int) -> "PointSet":
        return cls(q, d, np.ones(domain.domain_size(q, d), dtype=bool))

    @classmethod
    def empty(cls, q: int, d: int) -> "PointSet":
        return cls(q, d, np.zeros(domain.domain_size(q, d), dtype=bool))

    @classmethod
    def random(cls, q: int, d: int, alpha: float, rng, fixed_size: bool = False) -> "PointSet":
        n = domain.domain_size(q, d)
        if not 0 < alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if fixed_size:
            size = int(round(alpha * n))
            mask = np.zeros(n, dtype=bool)
            mask[rng.choice(n, size=size, replace=False)] = True
        else:
            mask = rng.random(n) < alpha
        return cls(q, d, mask)

    @classmethod
    def from_points(cls, q: int, d: int, points) -> "PointSet":
        mask = np.zeros(domain.domain_size(q, d), dtype=bool)
        for p in points:
            mask[domain.index_of(p, q)] = True
        return cls(q, d, mask)

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def density(self) -> float:
        return self.size / self.mask.shape[0]

    def indicator(self) -> DenseFunction:
        return DenseFunction(self.q, self.d, self.mask.astype(np.complex128))

    def translate(self, t) -> "PointSet":
        """The set A + t."""
        grid = domain.as_grid(self.mask, self.q, self.d)
        shift = tuple(c % self.q for c in t)
        return PointSet(self.q, self.d, domain.as_flat(np.roll(grid, shift, axis=tuple(range(self.d)))))

    def apply_linear(self, matrix) -> "PointSet":
        """The image set U(A) for an invertible matrix U."""
        coords = domain.coords_matrix(self.q, self.d).astype(np.int64)
        u = np.asarray(matrix, dtype=np.int64) % self.q
        images = domain.index_array(coords @ u.T, self.q)
        out = np.zeros_like(self.mask)
        out[images] = self.mask
        return PointSet(self.q, self.d, out)


# ---------------------------------------------------------------------------
# weighted tuple sums
# ---------------------------------------------------------------------------

def s_weight(field: PrimeField, ys, simplex: Simplex) -> int:
    """Product of the first len(ys) step weights; q^binom(j+1,2) exactly on
    tuples gram-matching the reference prefix, else 0."""
    total = 1
    for j, y in enumerate(ys, start=1):
        w = conditional_value(field, list(ys[: j - 1]), step_targets(field, simplex, j), y)
        if w == 0:
            return 0
        total *= w
    return total


def support_tuples(field: PrimeField, simplex: Simplex, j: int, independent: bool = True) -> list:
    """All tuples (y_1, ..., y_j) matching the reference dot products,
    optionally restricted to linearly independent tuples.

    Candidates at each level come from vectorized masks over the domain;
    cached dot arrays for already-chosen vectors keep each node at O(q^d).
    Independence is enforced by masking out Span(chosen), which has only
    q^level points and never needs a per-candidate rank computation."""
    q = field.q
    d = simplex.d
    if j > simplex.k:
        raise ValueError("j exceeds the reference simplex size")
    gram = gram_matrix(field, simplex)
    lengths = domain.lengths_vector(q, d)
    out: list = []

    def descend(chosen: list, dot_arrays: list):
        level = len(chosen)
        mask = lengths == gram[level][level]
        for i in range(level):
            mask = mask & (dot_arrays[i] == gram[i][level])
        if independent:
            mask = mask & ~span_mask(field, chosen, d)
        for idx in np.nonzero(mask)[0]:
            y = domain.point_of(int(idx), q, d)
            if level + 1 == j:
                out.append(tuple(chosen) + (y,))
            else:
                descend(chosen + [y], dot_arrays + [domain.dots_with(q, d, y)])

    descend([], [])
    return out


def starred_average(func: Callable, field: PrimeField, d: int, j: int) -> float:
    """q^{-jd} sum of func over linearly independent j-tuples of F_q^d,
    by literal enumeration of the whole tuple space (small cases only)."""
    q = field.q
    n = domain.domain_size(q, d)
    if j > d:
        warnings.warn(f"no independent {j}-tuples in dimension {d}; average is 0", stacklevel=2)
        return 0.0
    if n ** j > STARRED_ENUM_CAP:
        raise ValueError(f"q^(jd) = {n ** j} exceeds the enumeration cap {STARRED_ENUM_CAP}")
    points = [domain.point_of(i, q, d) for i in range(n)]
    total = 0.0

    def rec(chosen: list):
        nonlocal total
        if len(chosen) == j:
            total += func(*chosen)
            return
        for p in points:
            if matrix_rank(field, chosen + [p]) != len(chosen) + 1:
                continue
            rec(chosen + [p])

    rec([])
    return total / float(n) ** j


def script_S(field: PrimeField, fs: Sequence[DenseFunction], simplex: Simplex,
             support: Optional[list] = None) -> float:
    """The normalized weighted count script_S_j(f_0, ..., f_j) for the
    j = len(fs) - 1 prefix of the reference simplex."""
    j = len(fs) - 1
    if j < 1:
        raise ValueError("need at least two functions")
    q = field.q
    d = simplex.d
    for f in fs:
        if (f.q, f.d) != (q, d):
            raise ValueError("function shape does not match the simplex domain")
    if support is None:
        support = support_tuples(field, simplex, j)
    total = 0.0 + 0.0j
    for ys in support:
        acc = fs[0].values.copy()
        for f, y in zip(fs[1:], ys):
            acc *= domain.translate_values(f.values, q, d, y)
        total += acc.mean()
    scale = float(q) ** (math.comb(j + 1, 2) - j * d)
    return float((total * scale).real)


def script_S_indicator_exact(field: PrimeField, masks: Sequence[np.ndarray], simplex: Simplex,
                             support: Optional[list] = None) -> Fraction:
    """Exact rational script_S for indicator inputs, aggregated through
    integer products (a separate path from the embedding counter).

    The support list comes out of the enumeration in prefix order, so the
    partial products for a shared tuple prefix are computed once."""
    j = len(masks) - 1
    q = field.q
    d = simplex.d
    if support is None:
        support = support_tuples(field, simplex, j)
    ints = [np.asarray(m, dtype=np.int32) for m in masks]
    total = 0
    prefix: list = []
    accs = [ints[0]]
    for ys in support:
        shared = 0
        while shared < len(prefix) and prefix[shared] == ys[shared]:
            shared += 1
        del prefix[shared:]
        del accs[shared + 1:]
        while len(prefix) < j:
            y = ys[len(prefix)]
            acc = accs[-1] * domain.translate_values(ints[len(prefix) + 1], q, d, y)
            prefix.append(y)
            accs.append(acc)
        total += int(accs[-1].sum())
    return Fraction(q ** math.comb(j + 1, 2) * total, q ** ((j + 1) * d))


# ---------------------------------------------------------------------------
# copy counting
# ---------------------------------------------------------------------------

@dataclass
class CountReport:
    """Exact embedding count of a reference simplex in a point set, with
    the main term and normalized error of the expected asymptotic.

    alpha is the realized density set_size / q^d (set_size makes it exact);
    density_threshold is the reference scale q^{(2k-d-r)/(k+1)} below which
    the asymptotic carries no guarantee.  It is reported, never enforced.
    """

    q: int
    d: int
    k: int
    rank: int
    alpha: float
    set_size: int
    exact_count: int
    unordered_count: int
    symmetry_factor: int
    s_value: float
    main_term: float
    error_bound: float
    normalized_error: float
    density_threshold: float
    dimension_warning: bool
    trial: Optional[int] = None

    def to_dict(self) -> dict:
        out = {
            "q": self.q,
            "d": self.d,
            "k": self.k,
            "rank": self.rank,
            "alpha": self.alpha,
            "set_size": self.set_size,
            "exact_count": self.exact_count,
            "unordered_count": self.unordered_count,
            "symmetry_factor": self.symmetry_factor,
            "s_value": self.s_value,
            "main_term": self.main_term,
            "error_bound": self.error_bound,
            "normalized_error": self.normalized_error,
            "density_threshold": self.density_threshold,
            "dimension_warning": self.dimension_warning,
        }
        if self.trial is not None:
            out["trial"] = self.trial
        return out


def gram_preserving_orderings(field: PrimeField, simplex: Simplex) -> int:
    """Number of orderings of the simplex points with the same Gram matrix;
    the divisor converting ordered embeddings to unordered copies."""
    import itertools

    ref = gram_matrix(field, simplex)
    count = 0
    for perm in itertools.permutations(simplex.points):
        if gram_matrix(field, Simplex(simplex.q, perm)) == ref:
            count += 1
    return count


def _count_embeddings(field: PrimeField, A: PointSet, simplex: Simplex) -> int:
    """Boolean embedding counter: walks the constrained tuple tree carrying
    the running intersection A and roll(A, -y_i), so shared prefixes share
    work and empty intersections prune whole subtrees."""
    q, d, k = A.q, A.d, simplex.k
    gram = gram_matrix(field, simplex)
    lengths = domain.lengths_vector(q, d)
    total = 0

    def descend(chosen: list, dot_arrays: list, hits: np.ndarray):
        nonlocal total
        level = len(chosen)
        mask = lengths == gram[level][level]
        for i in range(level):
            mask = mask & (dot_arrays[i] == gram[i][level])
        mask = mask & ~span_mask(field, chosen, d)
        for idx in np.nonzero(mask)[0]:
            y = domain.point_of(int(idx), q, d)
            deeper = hits & domain.translate_values(A.mask, q, d, y)
            if level + 1 == k:
                total += int(np.count_nonzero(deeper))
            elif deeper.any():
                descend(chosen + [y], dot_arrays + [domain.dots_with(q, d, y)], deeper)

    descend([], [], A.mask)
    return total


def count_isometric_copies(A: PointSet, simplex: Simplex, field: Optional[PrimeField] = None,
                           support: Optional[list] = None, trial: Optional[int] = None) -> CountReport:
    """Exact number of tuples (x, y_1..y_k) with independent y's such that
    x and every x + y_i lie in A and (0, y_1..y_k) is ordered-isometric to
    the reference simplex.

    Runs the boolean embedding counter and the exact rational script_S
    path (separate enumeration, separate aggregation) and insists they
    agree as integers before reporting.
    """
    field = field or PrimeField(A.q)
    if (A.q, A.d) != (simplex.q, simplex.d):
        raise ValueError("point set and simplex live in different domains")
    if not simplex_is_valid(field, simplex):
        raise ValueError("reference is not a valid simplex")
    q, d, k = A.q, A.d, simplex.k
    r = simplex_rank(field, simplex)
    warn = d <= 2 * k - r
    if warn:
        warnings.warn(
            f"d = {d} is at most 2k - r = {2 * k - r}: the count may be degenerate",
            stacklevel=2,
        )

    exact = _count_embeddings(field, A, simplex)
    s_exact = script_S_indicator_exact(field, [A.mask] * (k + 1), simplex, support=support)
    scale = q ** ((k + 1) * d - math.comb(k + 1, 2))
    if s_exact * scale != exact:
        raise RuntimeError("embedding count and script_S disagree; internal inconsistency")

    sym = gram_preserving_orderings(field, simplex)
    size = A.size
    af = size / q ** d
    main = af ** (k + 1) * scale
    err_scale = af ** ((k + 1) / 2) * float(q) ** (k - (d + r) / 2)
    num = abs(exact / scale - af ** (k + 1))
    normalized = 0.0 if num == 0.0 else num / err_scale
    return CountReport(
        q=q,
        d=d,
        k=k,
        rank=r,
        alpha=af,
        set_size=size,
        exact_count=exact,
        unordered_count=exact // sym,
        symmetry_factor=sym,
        s_value=float(s_exact),
        main_term=main,
        error_bound=err_scale * scale,
        normalized_error=normalized,
        density_threshold=float(q) ** ((2 * k - d - r) / (k + 1)),
        dimension_warning=warn,
        trial=trial,
    )


# ---------------------------------------------------------------------------
# inequality and asymptotic checks
# ---------------------------------------------------------------------------

def verify_dependent_bound(field: PrimeField, simplex: Simplex, j: int, anchors) -> dict:
    """Exact check that the step-j mass carried by Span(anchors) stays
    under q^{2j - 1 - r_{j-1}}."""
    check_anchors(field, simplex, anchors)
    if len(anchors) != j - 1:
        raise ValueError("need exactly j - 1 anchors")
    q = field.q
    d = simplex.d
    targets = step_targets(field, simplex, j)
    space = subspace_span(field, anchors, d)
    total = 0
    for y in span_elements(field, space):
        total += conditional_value(field, list(anchors), targets, y)
    r_prev = simplex_rank(field, prefix_simplex(simplex, j - 1))
    bound = q ** (2 * j - 1 - r_prev)
    return {
        "lemma": "4.1",
        "q": q,
        "d": d,
        "j": j,
        "rank": r_prev,
        "value": total,
        "bound": bound,
        "pass": total <= bound,
    }


def verify_count_asymptotic(field: PrimeField, simplex: Simplex, j: int,
                            support: Optional[list] = None) -> dict:
    """script_S_j(1,...,1) = 1 + O(q^{j-(d+r_j)/2}), evaluated exactly from
    the independent support size."""
    q = field.q
    d = simplex.d
    if support is None:
        support = support_tuples(field, simplex, j)
    n_tuples = len(support)
    s_val = Fraction(q ** math.comb(j + 1, 2) * n_tuples, q ** (j * d))
    r_j = simplex_rank(field, prefix_simplex(simplex, j))
    err = abs(float(s_val) - 1.0)
    bound = float(q) ** (j - (d + r_j) / 2)
    return {
        "lemma": "4.2",
        "q": q,
        "d": d,
        "j": j,
        "rank": r_j,
        "s_value": float(s_val),
        "max_err": err,
        "bound": bound,
        "implied_constant": err / bound,
    }


def verify_error_lemma(field: PrimeField, simplex: Simplex, j: int,
                       xis: Optional[Sequence] = None) -> dict:
    """Starred average of S_{j-1} |muhat(xi)|^2 against q^{2j - d - r_j},
    for the supplied nonzero frequencies (all of them by default)."""
    q = field.q
    d = simplex.d
    if not 2 <= j <= simplex.k:
        raise ValueError("need 2 <= j <= k")
    n = domain.domain_size(q, d)
    if xis is None:
        xi_idx = np.arange(1, n, dtype=np.int64)
    else:
        xi_idx = np.array([domain.index_of(x, q) for x in xis], dtype=np.int64)
        if np.any(xi_idx == 0):
            raise ValueError("xi = 0 is rejected")
        if xi_idx.size == 0:
            raise ValueError("need at least one frequency")
    anchors_support = support_tuples(field, simplex, j - 1)
    targets = step_targets(field, simplex, j)
    acc = np.zeros(n, dtype=np.float64)
    for anchors in anchors_support:
        mu = build_conditional(field, list(anchors), targets, d)
        acc += np.abs(fourier_transform(mu).values) ** 2
    weight = float(q) ** (math.comb(j, 2) - (j - 1) * d)
    values = acc[xi_idx] * weight
    r_j = simplex_rank(field, prefix_simplex(simplex, j))
    bound = float(q) ** (2 * j - d - r_j)
    worst = int(np.argmax(values))
    return {
        "lemma": "4.3",
        "q": q,
        "d": d,
        "j": j,
        "rank": r_j,
        "n_frequencies": int(xi_idx.size),
        "max_value": float(values.max()),
        "worst_xi": list(domain.point_of(int(xi_idx[worst]), q, d)),
        "bound": bound,
        "implied_constant": float(values.max() / bound),
    }


# ---------------------------------------------------------------------------
# randomized experiments
# ---------------------------------------------------------------------------

def random_set_experiment(field: PrimeField, simplex: Simplex, alpha: float, trials: int,
                          seed: int, threads: int = 1, fixed_size: bool = False) -> list:
    """Sample random sets of target density alpha and report the embedding
    count statistics per trial.

    The master seed expands through a splittable seed sequence, one child
    per trial, so reports are deterministic for a fixed seed no matter how
    many worker threads run the trials.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    q, d = simplex.q, simplex.d
    r = simplex_rank(field, simplex)
    if d <= 2 * simplex.k - r:
        warnings.warn(
            f"d = {d} is at most 2k - r = {2 * simplex.k - r}: the count may be degenerate",
            stacklevel=2,
        )
    support = support_tuples(field, simplex, simplex.k)
    children = np.random.SeedSequence(seed).spawn(trials)

    def run_trial(i: int) -> CountReport:
        rng = np.random.default_rng(children[i])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            A = PointSet.random(q, d, alpha, rng, fixed_size=fixed_size)
            return count_isometric_copies(A, simplex, field=field, support=support, trial=i)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run_trial, range(trials)))
    return [run_trial(i) for i in range(trials)]
