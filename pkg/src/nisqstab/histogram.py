"""Empirical histograms over a bounded support.

Histograms hold probability *mass* per bin (not density). All distance
computations in :mod:`nisqstab.mbd` assume both operands live on the same
grid; :func:`align` puts two arbitrary histograms onto a common one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Sequence

import numpy as np

DEFAULT_BINS = 20
MASS_TOL = 1e-9


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SampleSeries:
    """Raw observations of one quantity, optionally timestamped (UTC)."""

    values: np.ndarray
    timestamps: tuple[datetime, ...] | None = None

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 1:
            raise ValueError("sample values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ValueError("sample values must be finite")
        object.__setattr__(self, "values", values)
        if self.timestamps is not None:
            ts = tuple(self.timestamps)
            if len(ts) != len(values):
                raise ValueError("timestamps and values differ in length")
            if any(t1 < t0 for t0, t1 in zip(ts, ts[1:])):
                raise ValueError("timestamps must be non-decreasing")
            object.__setattr__(self, "timestamps", ts)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Support:
    """Closed interval [a, b] with normalisation ``gamma = max(|a|, |b|)``."""

    a: float
    b: float
    gamma: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise ValueError("support bounds must be finite")
        if not a < b:
            raise ValueError(f"degenerate support: a={a} is not below b={b}")
        gamma = max(abs(a), abs(b))
        if self.gamma is not None and float(self.gamma) != gamma:
            raise ValueError(f"gamma must equal max(|a|, |b|) = {gamma}, got {self.gamma}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def probability(cls) -> "Support":
        return cls(0.0, 1.0)

    def union(self, other: "Support") -> "Support":
        return Support(min(self.a, other.a), max(self.b, other.b))


@dataclass(frozen=True, eq=False)
class Histogram:
    """Probability mass on ``len(edges) - 1`` bins spanning ``support``."""

    edges: np.ndarray
    mass: np.ndarray
    support: Support

    def __post_init__(self):
        edges = _frozen(self.edges)
        mass = _frozen(self.mass)
        if edges.ndim != 1 or len(edges) < 2:
            raise ValueError("need at least two bin edges")
        if mass.shape != (len(edges) - 1,):
            raise ValueError(f"{len(edges) - 1} bins but {mass.size} mass entries")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")
        if edges[0] != self.support.a or edges[-1] != self.support.b:
            raise ValueError("outer edges must coincide with the support bounds")
        if np.any(mass < 0) or not np.all(np.isfinite(mass)):
            raise ValueError("bin masses must be finite and non-negative")
        if abs(mass.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"bin masses sum to {mass.sum()!r}, expected 1")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "mass", mass)

    @property
    def bins(self) -> int:
        return len(self.mass)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def same_grid(self, other: "Histogram") -> bool:
        return self.support == other.support and np.array_equal(self.edges, other.edges)

    def __repr__(self) -> str:
        return f"Histogram(bins={self.bins}, support=[{self.support.a:g}, {self.support.b:g}])"


def _values(series) -> np.ndarray:
    if isinstance(series, SampleSeries):
        return series.values
    return np.asarray(series, dtype=float)


def pooled_support(
    series_list: Iterable[SampleSeries | Sequence[float]],
    pad_fraction: float = 0.0,
    probability: bool = False,
) -> Support:
    """Common support for several sample sets.

    The empirical range ``[min, max]`` over every series is widened by
    ``pad_fraction * (max - min)`` on each side. If ``probability`` is set
    the variable is known to live in [0, 1] and that support is returned
    instead, regardless of the data.
    """
    if pad_fraction < 0:
        raise ValueError("pad_fraction must be non-negative")
    arrays = [_values(s) for s in series_list]
    if not arrays or any(a.size == 0 for a in arrays):
        raise ValueError("no samples")
    if probability:
        return Support.probability()
    lo = min(float(a.min()) for a in arrays)
    hi = max(float(a.max()) for a in arrays)
    span = hi - lo
    if span == 0:
        raise ValueError(f"degenerate support: every sample equals {lo}")
    return Support(lo - pad_fraction * span, hi + pad_fraction * span)


def uniform_edges(support: Support, bins: int) -> np.ndarray:
    edges = np.linspace(support.a, support.b, bins + 1)
    edges[0], edges[-1] = support.a, support.b
    return edges


def build_histogram(samples, support: Support, bins: int = DEFAULT_BINS) -> Histogram:
    """Bin ``samples`` into ``bins`` equal-width bins on ``support``.

    The last bin is closed on the right, so a sample equal to ``support.b``
    is counted.
    """
    if int(bins) != bins or bins < 1:
        raise ValueError(f"bins must be a positive integer, got {bins!r}")
    values = _values(samples)
    if values.size == 0:
        raise ValueError("no samples")
    outside = values[(values < support.a) | (values > support.b)]
    if outside.size:
        raise ValueError(
            f"out of support: value {outside[0]!r} not in [{support.a}, {support.b}]"
        )
    edges = uniform_edges(support, int(bins))
    counts, _ = np.histogram(values, bins=edges)
    return Histogram(edges, counts / values.size, support)


def rebin(h: Histogram, edges: np.ndarray, support: Support) -> Histogram:
    """Redistribute ``h`` onto ``edges``, splitting each bin's mass by overlap.

    Mass is assumed uniform within an old bin, so the cumulative mass is
    piecewise linear in x and each new bin receives the increment of that
    curve across it.
    """
    if support == h.support and np.array_equal(edges, h.edges):
        return h
    cdf = np.concatenate(([0.0], np.cumsum(h.mass)))
    cdf[-1] = 1.0
    new_cdf = np.interp(edges, h.edges, cdf, left=0.0, right=1.0)
    mass = np.clip(np.diff(new_cdf), 0.0, None)
    return Histogram(edges, mass / mass.sum(), support)


def align(f: Histogram, g: Histogram) -> tuple[Histogram, Histogram]:
    """Put ``f`` and ``g`` on one uniform grid.

    The common support is the union of both supports and the bin count is
    the larger of the two. Inputs already sharing a grid come back as-is.
    """
    if f.same_grid(g):
        return f, g
    support = f.support.union(g.support)
    edges = uniform_edges(support, max(f.bins, g.bins))
    return rebin(f, edges, support), rebin(g, edges, support)
