import math

import numpy as np


class Aggregate:
    """
    Running moments of Monte-Carlo samples.

    `mean` and `m2` (sum of squared deviations from the mean) are scalars or
    arrays (coordinatewise statistics). Batches are merged with the pairwise
    Welford update, so the variance stays accurate when the mean is large
    relative to the spread. `p` is the sample mean and `stderr` the standard
    error of that mean.
    """

    mean: float | np.ndarray
    m2: float | np.ndarray
    count: int

    def __init__(self, mean: float | np.ndarray = 0., m2: float | np.ndarray = 0., count: int = 0):
        self.mean = mean
        self.m2 = m2
        self.count = count

    @classmethod
    def of(cls, samples: np.ndarray) -> 'Aggregate':
        """Aggregate a batch of samples stacked along axis 0."""
        samples = np.asarray(samples, dtype=float)
        if samples.shape[0] == 0:
            return cls()
        mean = samples.mean(axis=0)
        return cls(mean, np.square(samples - mean).sum(axis=0), samples.shape[0])

    @property
    def p(self) -> float | np.ndarray:
        return 0. if self.count == 0 else self.mean

    @property
    def variance(self) -> float | np.ndarray:
        if self.count < 2:
            return 0. * self.mean
        return np.maximum(self.m2 / (self.count - 1), 0.)

    @property
    def stderr(self) -> float | np.ndarray:
        if self.count == 0:
            return math.inf
        return np.sqrt(self.variance / self.count)

    def update(self, update: 'Aggregate') -> None:
        merged = self + update
        self.mean, self.m2, self.count = merged.mean, merged.m2, merged.count

    def scaled(self, scale: float) -> 'Aggregate':
        """Statistics of `scale * sample`."""
        return type(self)(self.mean * scale, self.m2 * scale * scale, self.count)

    def __add__(self, other: 'Aggregate') -> 'Aggregate':
        if other.count == 0:
            return type(self)(self.mean, self.m2, self.count)
        if self.count == 0:
            return type(self)(other.mean, other.m2, other.count)
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / count)
        m2 = self.m2 + other.m2 + np.square(delta) * (self.count * other.count / count)
        return type(self)(mean, m2, count)

    def __repr__(self):
        if np.ndim(self.mean) == 0:
            return f'{float(self.p):.6g} ± {float(self.stderr):.2g} (n={self.count})'
        return f'Aggregate(shape={np.shape(self.mean)}, n={self.count})'
