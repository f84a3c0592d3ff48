"""Missing-edge-ratio bound, replicate budgeting, and parameter selection.

A pair at per-bit mismatch probability ``p`` survives one replicate with
probability ``P[Bin(length, p) <= mismatch]``; the chance it is missed by
all ``replicates`` independent replicates is the survival complement raised
to that power.  All of it is evaluated in log space so bounds far below
double-precision underflow of the naive product are still exact to ten or
more significant digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError

__all__ = [
    "AutoTuneReport",
    "MsmParams",
    "OutputEstimate",
    "auto_params",
    "auto_params_detailed",
    "estimate_output_size",
    "min_replicates",
    "missing_edge_bound",
]

_WILSON_Z = 1.959963984540054  # two-sided 95%
_lgamma = np.frompyfunc(math.lgamma, 1, 1)


@dataclass(frozen=True)
class MsmParams:
    """Parameter bundle for the multi-sort graph builder.

    Attributes:
        epsilon: cosine-distance radius.
        gamma: missing-edge-ratio budget (1 disables the guarantee).
        length: projection bits per replicate.
        mismatch: Hamming budget d.
        blocks: block count k for the masked sorts.
        replicates: number of independent projections Q.
        seed: base seed for all randomness.
    """
    epsilon: float
    gamma: float
    length: int
    mismatch: int
    blocks: int
    replicates: int
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.epsilon <= 1.0):
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if not (0 <= self.mismatch < self.blocks <= self.length):
            raise ValueError(
                f"need 0 <= mismatch < blocks <= length, got mismatch="
                f"{self.mismatch}, blocks={self.blocks}, length={self.length}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")


@dataclass(frozen=True)
class OutputEstimate:
    """Sampled estimate of the neighbor-pair count S.

    ``estimate_s = hits / sampled_pairs * total_pairs``; the confidence
    interval is a 95% Wilson interval on the hit fraction, scaled the same
    way.
    """
    sampled_pairs: int
    hits: int
    total_pairs: int
    estimate_s: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class AutoTuneReport:
    """How auto-tuning arrived at its parameters."""
    collision_p: float
    initial_length: int
    halved: bool
    q_gamma: int
    replicate_cap: int
    cap_applied: bool
    achieved_bound: float


def _log_capture_tail(length: int, mismatch: int, p: float) -> float:
    """log P[Bin(length, p) > mismatch], the per-replicate miss probability.

    Computed as a max-shifted log-sum-exp over the upper binomial terms;
    returns ``-inf`` when the tail is empty (mismatch >= length or p == 0).
    """
    if mismatch >= length or p == 0.0:
        return -math.inf
    if p == 1.0:
        return 0.0
    ks = np.arange(mismatch + 1, length + 1, dtype=np.float64)
    log_comb = (_lgamma(length + 1.0) - _lgamma(ks + 1.0)
                - _lgamma(length - ks + 1.0)).astype(np.float64)
    log_terms = log_comb + ks * math.log(p) + (length - ks) * math.log1p(-p)
    peak = log_terms.max()
    return float(peak + math.log(np.exp(log_terms - peak).sum()))


def missing_edge_bound(length: int, mismatch: int, p: float,
                       replicates: int) -> float:
    """Expected missing-edge ratio for edges at per-bit mismatch prob ``p``.

    ``(1 - P[Bin(length, p) <= mismatch]) ** replicates``, evaluated in log
    space.  This bounds the expected fraction of true edges absent from the
    merged output when every edge's mismatch probability is at most ``p``.

    Args:
        length: bits per string.
        mismatch: Hamming budget d (``0 <= mismatch <= length``).
        p: per-bit mismatch probability in [0, 1].
        replicates: number of independent replicates, >= 1.

    Returns:
        The bound as a float; exact to >= 10 significant digits down to
        1e-300, and 0.0 when it underflows entirely.
    """
    if length < 0 or mismatch < 0 or mismatch > length:
        raise ValueError(f"need 0 <= mismatch <= length, got {mismatch}, {length}")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must be in [0, 1], got {p}")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    log_tail = _log_capture_tail(length, mismatch, p)
    if log_tail == -math.inf:
        return 0.0
    out = replicates * log_tail
    return math.exp(out) if out > -746.0 else 0.0


def min_replicates(length: int, mismatch: int, p: float, gamma: float) -> int:
    """Smallest replicate count whose missing-edge bound is at most ``gamma``.

    Solved in closed form as ``ceil(log gamma / log tail)`` and then verified
    by direct evaluation of the bound on both sides.

    Raises:
        InfeasibleError: when a single replicate can never capture the pair
            (the binomial tail equals 1), so no finite count reaches the
            budget.
    """
    if not (0.0 < gamma <= 1.0):
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    log_tail = _log_capture_tail(length, mismatch, p)
    if log_tail == -math.inf:
        return 1
    if log_tail >= 0.0:
        raise InfeasibleError(
            f"a replicate at length={length}, mismatch={mismatch}, p={p} "
            "captures nothing; no replicate count reaches the budget")
    log_gamma = math.log(gamma)
    q = max(1, math.ceil(log_gamma / log_tail))
    while q * log_tail > log_gamma:
        q += 1
    while q > 1 and (q - 1) * log_tail <= log_gamma:
        q -= 1
    return q


def _wilson_interval(hits: int, trials: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    z = _WILSON_Z
    p_hat = hits / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / trials
                         + z * z / (4.0 * trials * trials)) / denom
    # At the extremes one endpoint is analytically exact; rounding must not
    # push it past the observed proportion.
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == trials else min(1.0, center + half)
    return lo, hi


def estimate_output_size(data, epsilon: float, sample_pairs: int = 10_000,
                         seed: int = 0) -> OutputEstimate:
    """Estimate the neighbor-pair count by uniform pair sampling.

    Unordered pairs are drawn uniformly with replacement; the hit fraction at
    cosine distance <= ``epsilon`` is extrapolated to all n(n-1)/2 pairs.

    Args:
        data: dataset or ``(n, dim)`` array with n >= 2.
        epsilon: cosine radius.
        sample_pairs: number of sampled pairs (>= 1).
        seed: sampling seed (kept separate from projection replicates).

    Returns:
        :class:`OutputEstimate` with a 95% confidence interval.
    """
    from .lsh import as_dataset  # local import to avoid a cycle at import time

    data = as_dataset(data)
    n = data.count
    if n < 2:
        raise ValueError("need at least two vectors to sample pairs")
    if sample_pairs < 1:
        raise ValueError("sample_pairs must be >= 1")
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence([int(seed), 0])))
    i = rng.integers(0, n, size=sample_pairs)
    j = rng.integers(0, n - 1, size=sample_pairs)
    j += (j >= i)
    x = data.vectors.astype(np.float64, copy=False)
    norms = np.sqrt(np.einsum("ij,ij->i", x, x))
    dots = np.einsum("ij,ij->i", x[i], x[j])
    dist = 1.0 - dots / (norms[i] * norms[j])
    hits = int(np.count_nonzero(dist <= epsilon))
    total = n * (n - 1) // 2
    lo, hi = _wilson_interval(hits, sample_pairs)
    return OutputEstimate(sampled_pairs=sample_pairs, hits=hits,
                          total_pairs=total,
                          estimate_s=hits / sample_pairs * total,
                          ci_low=lo * total, ci_high=hi * total)


def auto_params_detailed(n: int, epsilon: float, gamma: float,
                         estimate: OutputEstimate | None, *, seed: int = 0,
                         q_threshold: int = 25, rep_scale: float = 30.0,
                         rep_floor: float = 5.0,
                         halve_fraction: float = 0.01
                         ) -> tuple[MsmParams, AutoTuneReport]:
    """Choose parameters for a target missing-edge budget, with a report.

    The string length defaults to ``2 * ceil(log2 n)`` and is halved when the
    estimated output is negligible (upper confidence limit below
    ``halve_fraction * n``).  The mismatch budget is the smallest d whose
    required replicate count stays within ``q_threshold``; the replicate
    count is additionally capped at ``ceil(max(rep_scale * S / n,
    rep_floor))``.  When the cap bites, the achieved bound in the report is
    the one to trust, not ``gamma``.

    Raises:
        InfeasibleError: when no mismatch budget fits the block constraints;
            exhaustive pairwise comparison is the sensible fallback.
    """
    if n < 2:
        raise ValueError("need at least two points")
    if not (0.0 < epsilon <= 1.0):
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    if not (0.0 < gamma <= 1.0):
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    p = math.acos(1.0 - epsilon) / math.pi
    initial_length = 2 * math.ceil(math.log2(n))
    length = initial_length
    halved = False
    if estimate is not None and estimate.ci_high < halve_fraction * n:
        length = max(1, length // 2)
        halved = True

    chosen = None
    for d in range(0, length // 2 + 1):
        k = max(2 * d, 1)
        if not (d < k <= length):
            continue
        try:
            q = min_replicates(length, d, p, gamma)
        except InfeasibleError:
            continue
        if q <= q_threshold:
            chosen = (d, k, q)
            break
    if chosen is None:
        raise InfeasibleError(
            f"no mismatch budget at length={length} needs <= {q_threshold} "
            f"replicates for gamma={gamma} (p={p:.4f}); this radius is too "
            "large for sorted enumeration - use exhaustive comparison")
    d, k, q_gamma = chosen

    if estimate is not None:
        cap = math.ceil(max(rep_scale * estimate.estimate_s / n, rep_floor))
    else:
        cap = q_gamma
    cap = max(cap, 1)
    q = min(q_gamma, cap)
    achieved = missing_edge_bound(length, d, p, q)
    params = MsmParams(epsilon=epsilon, gamma=gamma, length=length,
                       mismatch=d, blocks=k, replicates=q, seed=seed)
    report = AutoTuneReport(collision_p=p, initial_length=initial_length,
                            halved=halved, q_gamma=q_gamma, replicate_cap=cap,
                            cap_applied=q < q_gamma, achieved_bound=achieved)
    return params, report


def auto_params(n: int, epsilon: float, gamma: float,
                estimate: OutputEstimate | None, *, seed: int = 0,
                q_threshold: int = 25, rep_scale: float = 30.0,
                rep_floor: float = 5.0,
                halve_fraction: float = 0.01) -> MsmParams:
    """Parameter selection (see :func:`auto_params_detailed` for the report)."""
    params, _ = auto_params_detailed(
        n, epsilon, gamma, estimate, seed=seed, q_threshold=q_threshold,
        rep_scale=rep_scale, rep_floor=rep_floor,
        halve_fraction=halve_fraction)
    return params
