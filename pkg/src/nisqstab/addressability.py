"""Addressability of a qubit pair and a two-stage correlated readout model.

Outcomes are 2-bit strings ``"xy"`` with ``x`` the first qubit (Q0) and
``y`` the second (Q1). Readout noise acts in two stages:

1. an uncorrelated symmetric channel, keeping the state with probability
   ``1 - p`` and moving to each of the other three states with ``p / 3``;
2. a correlated Markov step parameterised by ``u`` in [0, 1/2]: the
   mixed states ``01`` and ``10`` jump to ``00`` and to ``11`` with
   probability ``u`` each; ``00`` and ``11`` are absorbing.

Addressability is ``F_A = 1 - 2 I(Q0:Q1) / (H(Q0) + H(Q1))`` in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .rng import make_rng

STATES = ("00", "01", "10", "11")
_INDEX = {s: i for i, s in enumerate(STATES)}
SUM_TOL = 1e-12
ENTROPY_TOL = 1e-9


def _as_vector(probabilities: Mapping[str, float]) -> np.ndarray:
    unknown = set(probabilities) - set(STATES)
    if unknown:
        raise ValueError(f"unknown outcome(s) {sorted(unknown)}; expected 2-bit strings")
    return np.array([float(probabilities.get(s, 0.0)) for s in STATES])


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Probability of each 2-bit measurement outcome."""

    vector: np.ndarray

    def __post_init__(self):
        v = np.array(self.vector, dtype=float)
        if v.shape != (4,):
            raise ValueError("an outcome distribution has exactly four entries")
        if np.any(v < 0) or np.any(v > 1) or not np.all(np.isfinite(v)):
            raise ValueError(f"probabilities must lie in [0, 1], got {v.tolist()}")
        if abs(v.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {v.sum()!r}, expected 1")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    @classmethod
    def from_mapping(cls, probabilities: Mapping[str, float]) -> "OutcomeDistribution":
        return cls(_as_vector(probabilities))

    @classmethod
    def point(cls, state: str) -> "OutcomeDistribution":
        return cls(_as_vector({state: 1.0}))

    @classmethod
    def uniform(cls) -> "OutcomeDistribution":
        return cls(np.full(4, 0.25))

    @property
    def probabilities(self) -> dict[str, float]:
        return dict(zip(STATES, self.vector.tolist()))

    def __getitem__(self, state: str) -> float:
        return float(self.vector[_INDEX[state]])

    def marginal(self, qubit: int) -> dict[str, float]:
        """Distribution of one bit (0 selects Q0, 1 selects Q1)."""
        p = self.vector
        zero = p[0] + p[1] if qubit == 0 else p[0] + p[2]
        return {"0": float(zero), "1": float(1.0 - zero)}

    def __eq__(self, other):
        return isinstance(other, OutcomeDistribution) and np.array_equal(self.vector, other.vector)

    def __repr__(self) -> str:
        body = ", ".join(f"{s}: {v:.6g}" for s, v in zip(STATES, self.vector))
        return f"OutcomeDistribution({{{body}}})"


def _check_u(u: float) -> float:
    if not 0.0 <= u <= 0.5:
        raise ValueError(f"correlation parameter u must be in [0, 0.5], got {u!r}")
    return float(u)


def _check_p(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability p must be in [0, 1], got {p!r}")
    return float(p)


@dataclass(frozen=True)
class CorrelatedNoiseModel:
    p: float = 0.0
    u: float = 0.0

    def __post_init__(self):
        _check_p(self.p)
        _check_u(self.u)

    def uncorrelated_matrix(self) -> np.ndarray:
        return uncorrelated_matrix(self.p)

    def correlated_matrix(self) -> np.ndarray:
        return markov_matrix(self.u)

    def apply(self, dist: OutcomeDistribution) -> OutcomeDistribution:
        return apply_markov_correlated(apply_uncorrelated(dist, self.p), self.u)


def uncorrelated_matrix(p: float) -> np.ndarray:
    """Row-stochastic matrix T with T[i, j] = P(j | i)."""
    p = _check_p(p)
    t = np.full((4, 4), p / 3.0)
    np.fill_diagonal(t, 1.0 - p)
    return t


def markov_matrix(u: float) -> np.ndarray:
    u = _check_u(u)
    return np.array([
        [1.0, 0.0, 0.0, 0.0],
        [u, 1.0 - 2 * u, 0.0, u],
        [u, 0.0, 1.0 - 2 * u, u],
        [0.0, 0.0, 0.0, 1.0],
    ])


def _push(dist: OutcomeDistribution, matrix: np.ndarray) -> OutcomeDistribution:
    out = dist.vector @ matrix
    return OutcomeDistribution(np.clip(out, 0.0, 1.0))


def apply_uncorrelated(dist: OutcomeDistribution, p: float) -> OutcomeDistribution:
    return _push(dist, uncorrelated_matrix(p))


def apply_markov_correlated(dist: OutcomeDistribution, u: float) -> OutcomeDistribution:
    return _push(dist, markov_matrix(u))


def binary_entropy(dist: Mapping[str, float] | Sequence[float]) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = np.array(list(dist.values()) if isinstance(dist, Mapping) else list(dist), dtype=float)
    if np.any(p < 0):
        raise ValueError("negative probability")
    if abs(p.sum() - 1.0) > ENTROPY_TOL:
        raise ValueError(f"probabilities sum to {p.sum()!r}, expected 1")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def _entropies(joint: OutcomeDistribution) -> tuple[float, float, float]:
    return (
        binary_entropy(joint.marginal(0)),
        binary_entropy(joint.marginal(1)),
        binary_entropy(joint.vector),
    )


def mutual_information(joint: OutcomeDistribution) -> float:
    """I(Q0:Q1) = H(Q0) + H(Q1) - H(Q0, Q1), in bits."""
    h0, h1, h01 = _entropies(joint)
    info = h0 + h1 - h01
    if -SUM_TOL <= info < 0:
        info = 0.0
    return info


def addressability(joint: OutcomeDistribution) -> float:
    h0, h1, _ = _entropies(joint)
    if h0 + h1 <= 0:
        raise ValueError("undefined addressability: both qubits are deterministic")
    fa = 1.0 - 2.0 * mutual_information(joint) / (h0 + h1)
    if -ENTROPY_TOL <= fa < 0:
        fa = 0.0
    elif 1 < fa <= 1 + ENTROPY_TOL:
        fa = 1.0
    return fa


def closed_form_fa(u: float) -> float:
    """F_A of the Markov model applied to uniformly prepared states."""
    u = _check_u(u)

    def xlogx(x):
        return 0.0 if x == 0 else x * math.log2(x)

    return 1.0 - 0.5 * xlogx(1 + 2 * u) - 0.5 * xlogx(1 - 2 * u)


@dataclass(frozen=True)
class ShotCounts:
    counts: Mapping[str, int]
    shots: int

    def __post_init__(self):
        counts = {s: int(self.counts.get(s, 0)) for s in STATES}
        if set(self.counts) - set(STATES):
            raise ValueError(f"unknown outcome(s) {sorted(set(self.counts) - set(STATES))}")
        if any(c < 0 for c in counts.values()):
            raise ValueError("counts must be non-negative")
        if self.shots <= 0 or sum(counts.values()) != self.shots:
            raise ValueError(f"counts sum to {sum(counts.values())}, shots = {self.shots}")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "ShotCounts":
        return cls(counts, int(sum(counts.values())))

    def frequencies(self) -> OutcomeDistribution:
        v = np.array([self.counts[s] for s in STATES], dtype=float) / self.shots
        return OutcomeDistribution(v)


def _preparation(prepared) -> np.ndarray:
    if prepared is None:
        return OutcomeDistribution.uniform().vector
    if isinstance(prepared, str):
        return OutcomeDistribution.point(prepared).vector
    if isinstance(prepared, OutcomeDistribution):
        return prepared.vector
    return OutcomeDistribution.from_mapping(prepared).vector


def _draw(rng: np.random.Generator, rows: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """For each shot, sample a column of ``matrix`` from the row it sits in."""
    cdf = np.cumsum(matrix, axis=1)
    r = rng.random(rows.size)
    return np.minimum((r[:, None] >= cdf[rows]).sum(axis=1), 3)


def simulate_counts(
    model: CorrelatedNoiseModel,
    prepared_state="00",
    shots: int = 10_000,
    seed: int = 0,
    rng: np.random.Generator | None = None,
) -> ShotCounts:
    """Shot-by-shot Monte Carlo through both noise stages.

    ``prepared_state`` is a 2-bit string, or a mapping/distribution giving a
    mixture of prepared basis states (``None`` means uniform). Every shot
    draws its prepared state, then its intermediate state, then its
    observed state.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    rng = make_rng(seed) if rng is None else rng
    prep = _preparation(prepared_state)
    alpha = _draw(rng, np.zeros(shots, dtype=int), prep[None, :])
    beta = _draw(rng, alpha, model.uncorrelated_matrix())
    delta = _draw(rng, beta, model.correlated_matrix())
    tally = np.bincount(delta, minlength=4)
    return ShotCounts(dict(zip(STATES, tally.tolist())), shots)


def estimate_fa(counts: ShotCounts) -> float:
    """Plug-in F_A from observed outcome frequencies."""
    return addressability(counts.frequencies())


def correlate_counts(counts: ShotCounts, u: float) -> OutcomeDistribution:
    """Apply the correlated stage analytically to measured (uncorrelated) counts."""
    return apply_markov_correlated(counts.frequencies(), u)


def spatial_fa_survey(
    per_pair_p: Mapping,
    u: float,
    shots: int = 1_000_000,
    seed: int = 0,
    preparation=None,
) -> dict:
    """Monte Carlo F_A for every pair, each with its own flip probability.

    Pair ``k`` samples from the child stream ``"survey/<k>"`` of ``seed``.
    With uniform ``preparation`` (the default) the symmetric uncorrelated
    stage leaves the state mix unchanged, so p only matters for
    non-uniform preparations.
    """
    if shots < 10_000:
        raise ValueError("spatial survey needs at least 10^4 shots per pair")
    out = {}
    for key, p in per_pair_p.items():
        label = f"{key[0]}-{key[1]}" if isinstance(key, tuple) else str(key)
        counts = simulate_counts(CorrelatedNoiseModel(p, u), preparation, shots,
                                 rng=make_rng(seed, f"survey/{label}"))
        out[key] = estimate_fa(counts)
    return out


@dataclass(frozen=True)
class SweepRow:
    u: float
    closed_form: float
    analytic: float
    monte_carlo: float

    @property
    def abs_error(self) -> float:
        return abs(self.monte_carlo - self.closed_form)


def fa_sweep(u_grid: Sequence[float], shots: int, seed: int = 0, p: float = 0.0,
             preparation=None) -> list[SweepRow]:
    """Closed form, exact pipeline and Monte Carlo F_A for each ``u``."""
    prep = OutcomeDistribution(_preparation(preparation))
    rows = []
    for u in u_grid:
        model = CorrelatedNoiseModel(p, u)
        counts = simulate_counts(model, prep, shots, rng=make_rng(seed, f"sweep/{float(u)!r}"))
        rows.append(SweepRow(float(u), closed_form_fa(u), addressability(model.apply(prep)),
                             estimate_fa(counts)))
    return rows
