"""
Monte-Carlo certificate of the unbiasedness and variance contracts of a compressor.

The empirical mean of repeated compressions is compared with x coordinatewise
using a family-wise corrected z threshold (never below 4 standard errors), and
the empirical variance ratio E||C(x) - x||^2 / ||x||^2 with the analytic omega.
"""
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from src.l2gd.aggregate import Aggregate
from src.l2gd.compressors.base import CompressorSpec
from src.l2gd.compressors.operators import compress_rows, variance_factor


def z_threshold(tests: int, family_alpha: float = 1e-3, floor: float = 4.) -> float:
    """Two-sided z threshold keeping the family-wise false alarm rate of `tests` checks below family_alpha."""
    return max(floor, float(norm.ppf(1. - family_alpha / (2. * max(tests, 1)))))


@dataclass(frozen=True)
class Certificate:
    label: str
    omega: float
    draws: int
    threshold: float
    max_z: float
    unbiased_ok: bool
    variance_ratio: float
    variance_ratio_stderr: float
    slack: float

    @property
    def variance_ok(self) -> bool:
        return self.variance_ratio <= self.omega * (1. + self.slack) + 1e-12

    @property
    def passed(self) -> bool:
        return self.unbiased_ok and self.variance_ok


def certify_compressor(
        spec: CompressorSpec,
        x: np.ndarray,
        draws: int,
        rng: np.random.Generator,
        tests: int | None = None,
        slack: float = 0.05,
        batch: int = 10_000,
) -> Certificate:
    """
    Certify one unbiased compressor at one nonzero vector.

    Args:
        tests: size of the family of coordinate tests the threshold is corrected for
            (defaults to the dimension; pass vectors * d when certifying many vectors)
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    norm_sq = float(x @ x)
    if norm_sq == 0:
        raise ValueError("certify_compressor needs a nonzero vector")
    omega = variance_factor(spec, d)

    mean = Aggregate()
    ratio = Aggregate()
    remaining = draws
    while remaining > 0:
        m = min(batch, remaining)
        payload, _ = compress_rows(spec, np.broadcast_to(x, (m, d)), rng)
        mean.update(Aggregate.of(payload))
        ratio.update(Aggregate.of(np.sum(np.square(payload - x), axis=1) / norm_sq))
        remaining -= m

    threshold = z_threshold(tests or d)
    deviation = np.abs(mean.p - x)
    stderr = mean.stderr
    tolerance = threshold * stderr + 1e-12 * (1. + np.abs(x))
    positive = stderr > 0
    max_z = float(np.max(deviation[positive] / stderr[positive])) if positive.any() else 0.
    return Certificate(
        label=spec.label(),
        omega=omega,
        draws=draws,
        threshold=threshold,
        max_z=max_z,
        unbiased_ok=bool(np.all(deviation <= tolerance)),
        variance_ratio=float(ratio.p),
        variance_ratio_stderr=float(ratio.stderr),
        slack=slack,
    )
