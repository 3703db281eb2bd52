"""Growth-deletion network model with preferential attachment.

Each unit of time ``r`` new participants join, each bringing ``c``
relationships to existing participants chosen with probability proportional
to degree, and then one participant chosen uniformly at random leaves
together with its relationships.

Participants left without relationships by a deletion stay in the graph as
degree-0 nodes unless ``prune_isolates`` is set.  Keeping them is what makes
the node count grow by exactly ``r - 1`` per step, which the stationary mean
degree ``2rc / (1 + r)`` depends on.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .graph import DegreeHistogram, DynamicGraph

log = logging.getLogger(__name__)

INIT_LABEL = -1
# Rejection draws per requested target before falling back to an explicit
# weighted draw over the remaining nodes.
_REJECTION_BUDGET = 64


def theoretical_mean_degree(r: int, c: int) -> float:
    """Stationary mean degree ``2rc / (1 + r)``; equals ``c`` for ``r = 1``."""
    if r < 1 or c < 1:
        raise ValueError("need r >= 1 and c >= 1")
    return 2 * r * c / (1 + r)


def theoretical_gamma(r: int) -> float:
    """Tail exponent ``(3r - 1) / (r - 1)`` of the stationary degree law."""
    if r <= 1:
        raise ValueError(f"gamma is defined for r >= 2, got r={r}")
    return (3 * r - 1) / (r - 1)


def theoretical_alpha(r: int) -> float:
    if r <= 1:
        raise ValueError(f"alpha is defined for r >= 2, got r={r}")
    return 2 / (r + 1)


@dataclass(frozen=True)
class TheoryValues:
    gamma: float
    alpha: float
    mean_degree: float

    @classmethod
    def for_model(cls, r: int, c: int) -> "TheoryValues":
        return cls(theoretical_gamma(r), theoretical_alpha(r), theoretical_mean_degree(r, c))


def attachment_kernel(hist: DegreeHistogram) -> dict[int, float]:
    """Linear preferential-attachment kernel ``pi_k = k / <k>`` on ``hist``."""
    mean = hist.mean_degree()
    return {k: k / mean for k in hist.counts}


@dataclass(frozen=True)
class SimParams:
    r: int
    c: int
    steps: int = 0
    burn_in: int | None = None
    seed: int = 0
    init_size: int | None = None
    prune_isolates: bool = False

    def __post_init__(self):
        if self.r < 2:
            raise ValueError(f"r must be >= 2 (r=1 is the constant-size regime), got {self.r}")
        if self.c < 1:
            raise ValueError(f"c must be >= 1, got {self.c}")
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if self.init_size is None:
            object.__setattr__(self, "init_size", max(self.c + 1, 5))
        if self.init_size < self.c + 1:
            raise ValueError(f"init_size must be >= c + 1 = {self.c + 1}")
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", self.steps // 4)
        if not 0 <= self.burn_in <= self.steps:
            raise ValueError("burn_in must lie in [0, steps]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class SimState:
    graph: DynamicGraph
    rng: random.Random
    step_count: int = 0
    # nodes whose last relationship disappeared with a deleted neighbour
    isolated_created: int = 0
    pruned: int = 0


def init_state(params: SimParams) -> SimState:
    """Seed clique of ``init_size`` nodes and a fresh generator."""
    g = DynamicGraph()
    nodes = [g.add_node() for _ in range(params.init_size)]
    for i, u in enumerate(nodes):
        for v in nodes[i + 1:]:
            g.add_edge(u, v, INIT_LABEL)
    return SimState(graph=g, rng=random.Random(params.seed))


class SamplingError(ValueError):
    pass


def sample_targets(g: DynamicGraph, count: int, rng: random.Random) -> list[int]:
    """Draw ``count`` distinct nodes, each draw proportional to degree.

    Draws are sequential without replacement: after each pick the remaining
    nodes are renormalised.  Rejecting already-picked endpoints of a uniform
    edge end gives exactly that conditional law; if rejections pile up (a few
    hubs hold most of the weight) the remaining draws switch to an explicit
    cumulative-weight search.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    eligible = g.n - g.n_isolated
    if count > eligible:
        raise SamplingError(f"need {count} targets but only {eligible} nodes have degree >= 1")
    chosen: list[int] = []
    budget = _REJECTION_BUDGET * count
    draw = g.random_endpoint
    while budget:
        w = draw(rng)
        if w not in chosen:
            chosen.append(w)
            if len(chosen) == count:
                return chosen
        budget -= 1
    if len(chosen) < count:
        chosen += _explicit_draws(g, count - len(chosen), set(chosen), rng)
    return chosen


def _explicit_draws(g, count, exclude, rng):
    nodes = [v for v in g.nodes() if v not in exclude and g.degree(v) > 0]
    weights = [g.degree(v) for v in nodes]
    out = []
    for _ in range(count):
        cum = np.cumsum(weights)
        i = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        out.append(nodes.pop(i))
        weights.pop(i)
    return out


def step(state: SimState, params: SimParams) -> None:
    """One unit of time: ``r`` preferential arrivals, then one uniform deletion."""
    g, rng = state.graph, state.rng
    label = state.step_count
    c = params.c
    for _ in range(params.r):
        targets = sample_targets(g, c, rng)
        g.add_star(g.add_node(), targets, label)
    victim = g.random_node(rng)
    isolated = {w for w in g.remove_node(victim) if g.degree(w) == 0}
    if isolated:
        state.isolated_created += len(isolated)
        if params.prune_isolates:
            for w in sorted(isolated):
                g.remove_node(w)
            state.pruned += len(isolated)
    state.step_count += 1


@dataclass
class SimResult:
    params: SimParams
    histogram: DegreeHistogram
    theory: TheoryValues
    # post-burn-in trace: step number and node/edge counts after that step
    trace_steps: np.ndarray = field(repr=False)
    trace_n: np.ndarray = field(repr=False)
    trace_m: np.ndarray = field(repr=False)
    isolated_created: int = 0
    pruned: int = 0

    @property
    def trace_mean_degree(self) -> np.ndarray:
        return 2.0 * self.trace_m / self.trace_n

    def stationary_mean_degree(self) -> float:
        """Time average of ``<k>`` over the post-burn-in window."""
        if len(self.trace_n) == 0:
            return self.histogram.mean_degree()
        return float(self.trace_mean_degree.mean())


def run(params: SimParams, state: SimState | None = None) -> SimResult:
    state = state or init_state(params)
    g = state.graph
    kept = params.steps - params.burn_in
    steps_out = np.empty(kept, dtype=np.int64)
    n_out = np.empty(kept, dtype=np.int64)
    m_out = np.empty(kept, dtype=np.int64)
    j = 0
    for t in range(params.steps):
        step(state, params)
        if t >= params.burn_in:
            steps_out[j] = t + 1
            n_out[j] = g.n
            m_out[j] = g.m
            j += 1
    if params.steps:
        log.info(
            "r=%d c=%d seed=%d: %d steps, %d isolates created (%.2f%% of steps)",
            params.r, params.c, params.seed, params.steps, state.isolated_created,
            100 * state.isolated_created / params.steps,
        )
    return SimResult(
        params=params,
        histogram=g.degree_histogram(),
        theory=TheoryValues.for_model(params.r, params.c),
        trace_steps=steps_out,
        trace_n=n_out,
        trace_m=m_out,
        isolated_created=state.isolated_created,
        pruned=state.pruned,
    )


def total_variation(p: dict[int, float], q: dict[int, float], k_max: int | None = None) -> float:
    """Half L1 distance between two degree laws, optionally restricted to ``k <= k_max``."""
    keys = set(p) | set(q)
    if k_max is not None:
        keys = {k for k in keys if k <= k_max}
    return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
