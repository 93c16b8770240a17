"""External clustering-quality indices: ARI, AMI, and Fowlkes-Mallows.

ARI follows the Hubert-Arabie pair-counting form, AMI the Vinh et al.
permutation-model correction with an arithmetic-mean normalizer, and FM is
the geometric mean of pairwise precision and recall.  Conventions for the
degenerate partitions are pinned here and unit-tested:

  * identical partitions score 1.0 under all three indices, including the
    single-cluster vs single-cluster case;
  * AMI between a zero-entropy labeling and a nontrivial one is 0.0;
  * FM with no same-cluster pairs on either side and differing partitions
    is 0.0 (the 0/0 guard).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


@dataclass
class ContingencyTable:
    """Cross-tabulation of two labelings over the same n points."""

    counts: np.ndarray    # (r, c) int64
    row_sums: np.ndarray  # (r,)
    col_sums: np.ndarray  # (c,)
    n: int

    @classmethod
    def from_labels(cls, a, b) -> "ContingencyTable":
        a = np.asarray(a)
        b = np.asarray(b)
        if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
            raise ValueError(
                f"label arrays must be equal-length vectors, got {a.shape} and {b.shape}")
        if a.size < 2:
            raise ValueError("need at least two points to compare partitions")
        _, ai = np.unique(a, return_inverse=True)
        _, bi = np.unique(b, return_inverse=True)
        r = int(ai.max()) + 1
        c = int(bi.max()) + 1
        counts = np.bincount(ai * c + bi, minlength=r * c).reshape(r, c)
        return cls(counts=counts.astype(np.int64),
                   row_sums=counts.sum(axis=1),
                   col_sums=counts.sum(axis=0),
                   n=int(a.size))


def _pair_count(x) -> int:
    # number of unordered pairs inside each group, exact integer arithmetic
    return int(sum(int(v) * (int(v) - 1) // 2 for v in np.ravel(x)))


def adjusted_rand_index(a, b) -> float:
    """Chance-corrected pair-counting agreement between two labelings.

    1.0 iff the partitions are identical up to relabeling; can go negative
    for worse-than-chance agreement.
    """
    t = ContingencyTable.from_labels(a, b)
    joint = _pair_count(t.counts)
    sa = _pair_count(t.row_sums)
    sb = _pair_count(t.col_sums)
    n2 = t.n * (t.n - 1) // 2
    numer = 2 * (n2 * joint - sa * sb)
    denom = n2 * (sa + sb) - 2 * sa * sb
    if denom == 0:
        # both partitions trivial (all-singletons or single cluster on both
        # sides), which means they are identical
        return 1.0
    return numer / denom


def _entropy(freqs: np.ndarray, n: int) -> float:
    p = freqs[freqs > 0] / n
    return float(-(p * np.log(p)).sum())


def _mutual_information(t: ContingencyTable) -> float:
    nz = t.counts > 0
    nij = t.counts[nz].astype(np.float64)
    outer = np.outer(t.row_sums, t.col_sums)[nz].astype(np.float64)
    return float((nij / t.n * (np.log(t.n * nij) - np.log(outer))).sum())


def expected_mutual_information(row_sums, col_sums, n: int) -> float:
    """E[MI] under the permutation model with fixed marginals.

    Hypergeometric sum over every contingency cell, evaluated with
    log-space factorials so large n cannot overflow.
    """
    a = np.asarray(row_sums, dtype=np.int64)
    b = np.asarray(col_sums, dtype=np.int64)
    lg = gammaln(np.arange(n + 2, dtype=np.float64) + 1.0)  # lg[m] = log(m!)
    log_n_fact = lg[n]
    total = 0.0
    for ai in a.tolist():
        for bj in b.tolist():
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            if hi < lo:
                continue
            nij = np.arange(lo, hi + 1, dtype=np.int64)
            log_w = (lg[ai] + lg[bj] + lg[n - ai] + lg[n - bj]
                     - log_n_fact - lg[nij] - lg[ai - nij] - lg[bj - nij]
                     - lg[n - ai - bj + nij])
            term = nij / n * (np.log(n * nij) - math.log(ai * bj))
            total += float((term * np.exp(log_w)).sum())
    return total


def adjusted_mutual_information(a, b) -> float:
    """Mutual information corrected for chance (permutation model),
    normalized by the arithmetic mean of the two entropies."""
    t = ContingencyTable.from_labels(a, b)
    ha = _entropy(t.row_sums, t.n)
    hb = _entropy(t.col_sums, t.n)
    if ha == 0.0 and hb == 0.0:
        return 1.0  # both single-cluster: identical partitions
    if ha == 0.0 or hb == 0.0:
        return 0.0  # one side carries no information
    mi = _mutual_information(t)
    emi = expected_mutual_information(t.row_sums, t.col_sums, t.n)
    denom = 0.5 * (ha + hb) - emi
    # Chance already explains everything the partitions could share
    # (e.g. two identical 2-point partitions); the ratio is 0/0 and we
    # define the score as 0.  The cutoff only absorbs float noise: any
    # genuinely nonzero denominator for moderate n sits far above it.
    if abs(denom) < 1e-9:
        return 0.0
    return (mi - emi) / denom


def fowlkes_mallows(a, b) -> float:
    """Geometric mean of pairwise precision and recall, in [0, 1]."""
    t = ContingencyTable.from_labels(a, b)
    tp = _pair_count(t.counts)
    pa = _pair_count(t.row_sums)
    pb = _pair_count(t.col_sums)
    if pa == 0 and pb == 0:
        return 1.0  # both all-singletons: identical partitions
    if pa == 0 or pb == 0:
        return 0.0  # no same-cluster pairs on one side only
    return tp / math.sqrt(pa * pb)
