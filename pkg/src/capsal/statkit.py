"""Statistical tests: Pearson correlation, Mantel permutation test,
Wilcoxon signed-rank test, Bonferroni correction.

All tests are two-sided. Permutation p-values use the add-one estimator
(count + 1) / (permutations + 1) so they are never zero, with a seeded
generator for reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _scipy_stats

from .ingest import DistanceMatrix

DEFAULT_PERMUTATIONS = 9999
DEFAULT_SEED = 20240601
EXACT_CUTOFF = 25


def _as_vector(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional vector")
    return arr


def pearson(x, y) -> float:
    """Product-moment correlation of two equal-length vectors."""
    x, y = _as_vector(x), _as_vector(y)
    if x.shape != y.shape:
        raise ValueError("vectors differ in length")
    if x.size < 2:
        raise ValueError("need at least two observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("correlation undefined for zero-variance input")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


@dataclass(frozen=True)
class PearsonResult:
    r: float
    p: float
    n: int


def pearson_test(x, y) -> PearsonResult:
    """Correlation plus a two-sided p-value from the exact t distribution."""
    x, y = _as_vector(x), _as_vector(y)
    r = pearson(x, y)
    n = x.size
    if n < 3 or abs(r) == 1.0:
        return PearsonResult(r, 0.0 if abs(r) == 1.0 else 1.0, n)
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * float(_scipy_stats.t.sf(abs(t), n - 2))
    return PearsonResult(r, min(1.0, p), n)


# ------------------------------------------------------------------
# Mantel test

@dataclass(frozen=True)
class MantelResult:
    r: float
    p: float
    permutations: int
    seed: int


def _upper_triangle(values: np.ndarray) -> np.ndarray:
    i, j = np.triu_indices(values.shape[0], k=1)
    return values[i, j]


def mantel(
    a: DistanceMatrix,
    b: DistanceMatrix,
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = DEFAULT_SEED,
) -> MantelResult:
    """Permutation test for correlation between two distance matrices.

    Rows and columns of `b` are permuted simultaneously; the two-sided
    p-value is the add-one fraction of permuted |r*| >= |r|.
    """
    if a.labels != b.labels:
        raise ValueError("distance matrices have mismatched labels")
    n = len(a.labels)
    if n < 3:
        raise ValueError("mantel test needs at least 3 items")
    if permutations < 1:
        raise ValueError("permutations must be positive")
    flat_a = _upper_triangle(a.values)
    r = pearson(flat_a, _upper_triangle(b.values))

    rng = np.random.default_rng(seed)
    i, j = np.triu_indices(n, k=1)
    extreme = 0
    for _ in range(permutations):
        perm = rng.permutation(n)
        permuted = b.values[np.ix_(perm, perm)]
        r_perm = pearson(flat_a, permuted[i, j])
        if abs(r_perm) >= abs(r):
            extreme += 1
    p = (extreme + 1) / (permutations + 1)
    return MantelResult(r=r, p=p, permutations=permutations, seed=seed)


# ------------------------------------------------------------------
# Wilcoxon signed-rank test

@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # sum of ranks of positive differences
    p: float
    n_effective: int
    mode: str  # "exact" | "normal"


def _signed_ranks(diff: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ranks = _rankdata(np.abs(diff))
    return ranks, diff > 0


def _rankdata(values: np.ndarray) -> np.ndarray:
    """Average ranks, ties shared (1-based)."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=float)
    i = 0
    sorted_vals = values[order]
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_two_sided_p(ranks: np.ndarray, w_plus: float) -> float:
    """Exact p over all 2^n sign assignments, via integer convolution.

    Ranks are doubled so tied half-ranks become integers; counts use
    arbitrary-precision integers, so the resulting p is exact.
    """
    scaled = [int(round(2 * r)) for r in ranks]
    total = sum(scaled)
    counts = [0] * (total + 1)
    counts[0] = 1
    upto = 0
    for r in scaled:
        upto += r
        for v in range(upto, r - 1, -1):
            counts[v] += counts[v - r]
    w2 = int(round(2 * w_plus))
    d = abs(2 * w2 - total)  # distance of 2*scaled-W from the symmetric centre
    extreme = sum(c for v, c in enumerate(counts) if abs(2 * v - total) >= d)
    return extreme / (1 << len(scaled))


def _normal_two_sided_p(ranks: np.ndarray, w_plus: float) -> float:
    """Normal approximation with tie and continuity corrections."""
    n = ranks.size
    mu = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    var -= float(np.sum(tie_counts**3 - tie_counts)) / 48.0
    if var <= 0:
        return 1.0
    d = w_plus - mu
    if d > 0:
        d -= 0.5
    elif d < 0:
        d += 0.5
    z = d / math.sqrt(var)
    return math.erfc(abs(z) / math.sqrt(2.0))


def wilcoxon_signed_rank(x, y, exact_cutoff: int = EXACT_CUTOFF) -> WilcoxonResult:
    """Paired two-sided test; zero differences dropped, ties mid-ranked.

    Exact enumeration p for small samples, normal approximation above
    `exact_cutoff`.
    """
    x, y = _as_vector(x), _as_vector(y)
    if x.shape != y.shape:
        raise ValueError("vectors differ in length")
    diff = x - y
    diff = diff[diff != 0.0]
    n = diff.size
    if n == 0:
        raise ValueError("all differences are zero; test undefined")
    ranks, positive = _signed_ranks(diff)
    w_plus = float(ranks[positive].sum())
    if n <= exact_cutoff:
        p = _exact_two_sided_p(ranks, w_plus)
        mode = "exact"
    else:
        p = _normal_two_sided_p(ranks, w_plus)
        mode = "normal"
    return WilcoxonResult(statistic=w_plus, p=min(1.0, p), n_effective=n, mode=mode)


# ------------------------------------------------------------------
# multiple comparisons

def bonferroni(p_values, alpha: float = 0.05) -> tuple[float, list[bool]]:
    """Family-wise correction: adjusted alpha and per-test significance."""
    p = list(p_values)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not p:
        raise ValueError("need at least one p-value")
    adjusted = alpha / len(p)
    return adjusted, [value < adjusted for value in p]
