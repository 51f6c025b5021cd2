"""Monte Carlo result records and their exact pooling."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .exceptions import DomainError


@dataclass(frozen=True)
class Estimate:
    """Sample mean with its standard error (sample std / sqrt(count))."""

    mean: float
    stderr: float
    count: int
    seed: Optional[int] = None

    @classmethod
    def from_samples(cls, values, seed: Optional[int] = None) -> "Estimate":
        v = np.asarray(values, dtype=float).reshape(-1)
        if v.size == 0:
            raise DomainError("cannot form an estimate from zero samples")
        se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
        return cls(float(np.mean(v)), se, int(v.size), seed)

    @property
    def variance(self) -> float:
        """Sample variance (ddof=1) of the underlying draws."""
        return self.stderr ** 2 * self.count

    @property
    def _m2(self) -> float:
        return self.variance * (self.count - 1)

    def z_score(self, exact: float) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.mean == exact else math.copysign(math.inf, self.mean - exact)
        return (self.mean - exact) / self.stderr

    def scaled(self, factor: float) -> "Estimate":
        return Estimate(self.mean * factor, self.stderr * abs(factor), self.count, self.seed)


def merge_estimates(parts: Iterable[Estimate]) -> Estimate:
    """Pool estimates from disjoint sample sets (Chan et al. pairwise update)."""
    parts = list(parts)
    if not parts:
        raise DomainError("merge_estimates needs at least one part")
    count, mean, m2 = parts[0].count, parts[0].mean, parts[0]._m2
    for p in parts[1:]:
        tot = count + p.count
        delta = p.mean - mean
        mean = mean + delta * p.count / tot
        m2 = m2 + p._m2 + delta * delta * count * p.count / tot
        count = tot
    se = math.sqrt(m2 / (count - 1) / count) if count > 1 else 0.0
    return Estimate(mean, se, count, parts[0].seed)


def combined_z(a: Estimate, b) -> float:
    """z statistic of ``a - b`` where b is an Estimate or an exact number."""
    if isinstance(b, Estimate):
        se = math.hypot(a.stderr, b.stderr)
        diff = a.mean - b.mean
    else:
        se = a.stderr
        diff = a.mean - float(b)
    if se == 0.0:
        return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    return diff / se
