"""Recurrence diagnostics through expected visit counts of W⁰ to boxes [0, x₁) x [0, x₂) and to the origin.

P[W⁰(n) in box] equals P[τₓ > n] for x = box; the two are estimated from independent streams and compared.
"""
import math
from typing import List

import numpy as np

from lindleywalk.core.common import DEFAULT_BLOCK_SIZE
from lindleywalk.core.distributions import IncrementDistribution
from lindleywalk.core.path_batches import origin_lindley_histograms
from lindleywalk.core.survival import survival_curve

AGREEMENT_SIGMAS = 4.0


class OccupationSeries:
    def __init__(self, box, paths: int, box_counts: np.ndarray, origin_counts: np.ndarray,
                 survival_terms: np.ndarray):
        self.box = box
        self.paths = paths
        self.n = np.arange(len(box_counts))
        self.box_terms = box_counts / paths
        self.origin_terms = origin_counts / paths
        self.survival_terms = survival_terms
        self.box_partial_sums = np.cumsum(self.box_terms)
        self.origin_partial_sums = np.cumsum(self.origin_terms)
        self.survival_partial_sums = np.cumsum(self.survival_terms)

    # |a - b| <= 4 sqrt(2 p (1 - p) / N) with p the pooled proportion
    def disagreements(self) -> List[int]:
        pooled = (self.box_terms + self.survival_terms) / 2
        sigma = np.sqrt(2 * pooled * (1 - pooled) / self.paths)
        # a 1/N slack keeps two single-path differences at a zero-variance point from failing
        bad = np.abs(self.box_terms - self.survival_terms) > AGREEMENT_SIGMAS * sigma + 1.0 / self.paths
        return [int(n) for n in np.flatnonzero(bad)]

    @property
    def tail_term(self) -> float:
        return float(self.box_terms[-1])

    # Growth of the partial sums over the last decade of n, against the decade before
    def decade_growth(self) -> float:
        n_max = len(self.n) - 1
        if n_max < 100:
            return math.nan
        last = self.box_partial_sums[n_max] - self.box_partial_sums[n_max // 10]
        before = self.box_partial_sums[n_max // 10] - self.box_partial_sums[n_max // 100]
        return float(last / before) if before > 0 else math.inf

    def rows(self):
        return [(int(n), float(b), float(bs), float(s), float(ss), float(o), float(os))
                for n, b, bs, s, ss, o, os in zip(self.n, self.box_terms, self.box_partial_sums, self.survival_terms,
                                                  self.survival_partial_sums, self.origin_terms,
                                                  self.origin_partial_sums)]


def occupation_series(dist: IncrementDistribution, box, n_max: int, paths: int, master_seed: int,
                      block_size: int = DEFAULT_BLOCK_SIZE, workers: int = 1) -> OccupationSeries:
    if not (box[0] > 0 and box[1] > 0):
        raise ValueError("box must be strictly positive, got " + str(box))
    box_counts, origin_counts = origin_lindley_histograms(dist, box, n_max, paths, master_seed, block_size, workers)
    curve = survival_curve(dist, tuple(box), list(range(n_max + 1)), paths, master_seed, block_size, workers)
    return OccupationSeries(tuple(box), paths, box_counts, origin_counts, curve.estimates)
