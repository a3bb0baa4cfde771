"""Chung-Lu realization by the Bernoulli method.

Two samplers produce the same distribution over simple graphs: every
unordered pair ``(i, j)`` is an edge independently with probability
``min(1, w_i * w_j / S)``.

* :func:`generate_bernoulli` flips one coin per pair, O(n^2) work.
* :func:`generate_edge_skipping` sorts weights in descending order, groups
  them into blocks, and jumps between candidate pairs with geometric skips
  drawn under the block's largest probability ``p_hat``.  Each candidate is
  kept with probability ``p_ij / p_hat``.  When a block holds a single weight
  value, ``p_hat`` is exact and nothing is rejected.  Expected work is
  O(n + |E| + blocks^2).

Random streams come from numpy's PCG64 seeded through ``SeedSequence``, so
trial ``t`` of seed ``s`` is the stream keyed ``(s, t)`` regardless of the
order trials run in.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .distributions import DegreeDistribution, WeightSequence, expand_to_weights

#: Above this many distinct weights, blocks are formed on a log scale instead.
MAX_EXACT_BLOCKS = 1024
#: Largest ratio between weights sharing one log-scale block.
BLOCK_RATIO = 1.25


class Sampler(str, enum.Enum):
    BERNOULLI = "bernoulli"
    SKIP = "skip"


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """PCG64 stream for ``seed``, split by the integer ``key`` path."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph; ``edges`` is an ``(E, 2)`` int array with ``i < j``."""

    node_count: int
    edges: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        e = np.sort(e, axis=1)
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.node_count)[: self.node_count]

    def canonical_edges(self) -> np.ndarray:
        """Edges sorted lexicographically, for comparisons and output."""
        if self.edge_count == 0:
            return self.edges
        order = np.lexsort((self.edges[:, 1], self.edges[:, 0]))
        return self.edges[order]

    def validate(self) -> None:
        e = self.edges
        if e.size and (e.min() < 0 or e.max() >= self.node_count):
            raise ValueError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError("self-loop")
        keys = e[:, 0] * max(self.node_count, 1) + e[:, 1]
        if np.unique(keys).size != keys.size:
            raise ValueError("duplicate edge")

    def write_edgelist(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for i, j in self.canonical_edges():
                fh.write(f"{i} {j}\n")


def _weights_array(w) -> np.ndarray:
    if isinstance(w, WeightSequence):
        return w.weights
    return WeightSequence(np.asarray(w, dtype=np.float64)).weights


def generate_bernoulli(w: WeightSequence | Sequence[float], seed: int | np.random.Generator) -> Graph:
    """Reference sampler: one uniform draw per unordered pair."""
    weights = _weights_array(w)
    n = len(weights)
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    if n < 2:
        return Graph(n, np.empty((0, 2), dtype=np.int64))
    S = weights.sum()
    rows, cols = [], []
    for i in range(n - 1):
        p = np.minimum(1.0, weights[i] * weights[i + 1 :] / S)
        hit = np.flatnonzero(rng.random(n - 1 - i) < p)
        if hit.size:
            rows.append(np.full(hit.size, i, dtype=np.int64))
            cols.append(hit + i + 1)
    if not rows:
        return Graph(n, np.empty((0, 2), dtype=np.int64))
    return Graph(n, np.column_stack([np.concatenate(rows), np.concatenate(cols)]))


def _blocks(ws: np.ndarray) -> list[tuple[int, int]]:
    """Contiguous ``[start, stop)`` blocks of the descending weight array."""
    n = len(ws)
    change = np.flatnonzero(ws[1:] != ws[:-1]) + 1
    if change.size + 1 > MAX_EXACT_BLOCKS:
        level = np.floor(np.log(ws) / np.log(BLOCK_RATIO))
        change = np.flatnonzero(level[1:] != level[:-1]) + 1
    bounds = np.concatenate([[0], change, [n]])
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]


def _skip_positions(rng: np.random.Generator, length: int, p: float) -> np.ndarray:
    """Indices in ``[0, length)`` kept independently with probability ``p``,
    generated by summing geometric gaps."""
    if length <= 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(length, dtype=np.int64)
    chunks = []
    pos = -1
    expected = length * p
    batch = int(expected + 4.0 * np.sqrt(expected) + 16)
    while True:
        gaps = rng.geometric(p, size=batch)
        steps = pos + np.cumsum(gaps)
        if steps[-1] < length:
            chunks.append(steps)
            pos = int(steps[-1])
            batch = int((length - pos) * p + 4.0 * np.sqrt((length - pos) * p) + 16)
            continue
        chunks.append(steps[steps < length])
        break
    return np.concatenate(chunks).astype(np.int64, copy=False)


def _triangle_offsets(n: int) -> np.ndarray:
    r = np.arange(n, dtype=np.int64)
    return r * n - r * (r + 1) // 2


def generate_edge_skipping(w: WeightSequence | Sequence[float], seed: int | np.random.Generator) -> Graph:
    """Linear-work sampler with the same per-pair law as :func:`generate_bernoulli`.

    Node ids refer to positions in ``w`` as given; sorting is internal.
    """
    weights = _weights_array(w)
    n = len(weights)
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    if n < 2:
        return Graph(n, np.empty((0, 2), dtype=np.int64))
    order = np.argsort(-weights, kind="stable")
    ws = weights[order]
    S = ws.sum()
    blocks = _blocks(ws)
    us, vs = [], []
    for a, (sa, ea) in enumerate(blocks):
        na = ea - sa
        exact_a = ws[sa] == ws[ea - 1]
        for sb, eb in blocks[a:]:
            nb = eb - sb
            p_hat = min(1.0, ws[sa] * ws[sb] / S)
            if sa == sb:
                if na < 2:
                    continue
                t = _skip_positions(rng, na * (na - 1) // 2, p_hat)
                offsets = _triangle_offsets(na)
                r = np.searchsorted(offsets, t, side="right") - 1
                u = sa + r
                v = sa + (t - offsets[r]) + r + 1
            else:
                t = _skip_positions(rng, na * nb, p_hat)
                u = sa + t // nb
                v = sb + t % nb
            if t.size == 0:
                continue
            if not (exact_a and ws[sb] == ws[eb - 1]):
                p = np.minimum(1.0, ws[u] * ws[v] / S)
                keep = rng.random(t.size) * p_hat < p
                u, v = u[keep], v[keep]
            us.append(u)
            vs.append(v)
    if not us:
        return Graph(n, np.empty((0, 2), dtype=np.int64))
    u = order[np.concatenate(us)]
    v = order[np.concatenate(vs)]
    return Graph(n, np.column_stack([u, v]))


SAMPLERS = {
    Sampler.BERNOULLI: generate_bernoulli,
    Sampler.SKIP: generate_edge_skipping,
}


def degree_distribution_of(g: Graph, m: int) -> DegreeDistribution:
    """Counts of nodes with degree exactly ``k`` for ``k = 1..m``.

    Isolated nodes and nodes above ``m`` go to ``zero_degree`` / ``overflow``.
    """
    deg = g.degrees()
    hist = np.bincount(deg, minlength=m + 1)
    counts = tuple(int(c) for c in hist[1 : m + 1])
    return DegreeDistribution(counts, zero_degree=int(hist[0]), overflow=int(hist[m + 1 :].sum()))


@dataclass(frozen=True)
class TrialStats:
    mean_counts: tuple
    trials: int
    seed: int
    node_count: int
    sampler: str
    mean_zero_degree: float = 0.0
    mean_overflow: float = 0.0
    mean_edges: float = 0.0
    per_trial: tuple = field(default=(), repr=False, compare=False)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.mean_counts, dtype=np.float64)

    def as_distribution(self) -> DegreeDistribution:
        return DegreeDistribution(self.mean_counts)


def average_over_trials(d: DegreeDistribution, trials: int, sampler: Sampler | str = Sampler.SKIP,
                        seed: int = 0, key: Sequence[int] = ()) -> TrialStats:
    """Mean observed degree distribution over ``trials`` seeded realizations.

    Trial ``t`` draws from stream ``(seed, *key, t)``; ``key`` lets callers
    such as experiment grids give every cell its own streams.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sample = SAMPLERS[Sampler(sampler)]
    w = expand_to_weights(d)
    m = d.m
    total = np.zeros(m)
    zero = overflow = edges = 0.0
    per_trial = []
    for t in range(trials):
        g = sample(w, make_rng(seed, *key, t))
        obs = degree_distribution_of(g, m)
        arr = obs.as_array()
        per_trial.append(arr)
        total += arr
        zero += obs.zero_degree
        overflow += obs.overflow
        edges += g.edge_count
    return TrialStats(
        mean_counts=tuple(float(c) for c in total / trials),
        trials=trials,
        seed=seed,
        node_count=len(w),
        sampler=Sampler(sampler).value,
        mean_zero_degree=zero / trials,
        mean_overflow=overflow / trials,
        mean_edges=edges / trials,
        per_trial=tuple(per_trial),
    )
