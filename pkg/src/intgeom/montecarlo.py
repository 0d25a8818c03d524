"""Chunked, reproducible Monte Carlo estimation."""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .geometry import RngStream, as_generator

DEFAULT_CHUNK = 50_000
ROUNDING_FLOOR = 1e-10


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo mean with its standard error."""

    mean: float
    stderr: float
    samples: int

    def z_against(self, other: "Estimate | float", rel_floor: float = ROUNDING_FLOOR) -> float:
        """|difference| in units of the combined standard error.

        The error is floored at ``rel_floor`` times the larger magnitude so a
        zero-variance estimator (constant integrand) compares at rounding
        level instead of dividing by zero.
        """
        if isinstance(other, Estimate):
            diff, se = self.mean - other.mean, sqrt(self.stderr**2 + other.stderr**2)
            ref = max(abs(self.mean), abs(other.mean))
        else:
            diff, se = self.mean - float(other), self.stderr
            ref = max(abs(self.mean), abs(float(other)))
        se = max(se, rel_floor * ref)
        if se == 0.0:
            return 0.0 if diff == 0.0 else float("inf")
        return abs(diff) / se

    def scaled(self, c: float) -> "Estimate":
        return Estimate(c * self.mean, abs(c) * self.stderr, self.samples)


def draw_chunked(draw, samples: int, rng, chunk: int = DEFAULT_CHUNK) -> np.ndarray:
    """Concatenate ``draw(generator, size)`` over chunks in a fixed order.

    With an :class:`RngStream`, chunk ``i`` uses the child stream ``i`` so
    results depend only on (seed, stream_id, chunk) and not on how the work
    is scheduled.  ``draw`` may return shape (size,) or (size, B).
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    parts = []
    shared = None if isinstance(rng, RngStream) else as_generator(rng)
    for i, start in enumerate(range(0, samples, chunk)):
        size = min(chunk, samples - start)
        g = rng.child(i).generator() if shared is None else shared
        parts.append(np.asarray(draw(g, size), dtype=float))
    return np.concatenate(parts, axis=0)


def summarize(values: np.ndarray, batches: int | None = None) -> Estimate:
    """Mean and standard error; batch means when ``batches`` is given."""
    values = np.asarray(values, dtype=float)
    N = len(values)
    mean = float(values.mean())
    if N < 2:
        return Estimate(mean, float("inf"), N)
    if batches is None:
        return Estimate(mean, float(values.std(ddof=1) / sqrt(N)), N)
    if N < 2 * batches:
        raise ValueError(f"{N} samples cannot form {batches} batches")
    usable = N - N % batches
    bm = values[:usable].reshape(batches, -1).mean(axis=1)
    return Estimate(mean, float(bm.std(ddof=1) / sqrt(batches)), N)


def mc_estimate(draw, samples: int, rng, batches: int | None = None, chunk: int = DEFAULT_CHUNK) -> Estimate:
    return summarize(draw_chunked(draw, samples, rng, chunk), batches)


def control_variate(y: np.ndarray, h: np.ndarray) -> Estimate:
    """Estimate E[y] using a control ``h`` with known mean zero.

    The regression coefficient beta = cov(y, h) / var(h) is fitted on the
    same samples; the resulting O(1/N) bias is far below the standard error.
    """
    y, h = np.asarray(y, dtype=float), np.asarray(h, dtype=float)
    N = len(y)
    hc = h - h.mean()
    var = float(hc @ hc)
    beta = float(hc @ (y - y.mean())) / var if var > 0 else 0.0
    adj = y - beta * h
    return Estimate(float(adj.mean()), float(adj.std(ddof=2) / sqrt(N)), N)
