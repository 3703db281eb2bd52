"""Dynamic undirected multigraph of debtor-creditor relationships.

Nodes are participants, edges are individual funding contributions.  Every
edge carries the label of the loan that created it, so that a maturing loan
removes exactly its own edges.  Parallel edges between the same pair are
allowed (two loans between the same lender and borrower are two
relationships) and degree counts multiplicity.

Besides adjacency, the graph keeps swap-remove arrays of live node and edge
ids.  They make uniform node sampling and degree-proportional endpoint
sampling O(1), which the growth simulator relies on.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterator


class GraphError(ValueError):
    """Raised for invalid graph mutations (self-loops, unknown nodes)."""


@dataclass(frozen=True)
class DegreeHistogram:
    """Immutable degree histogram: ``counts[k]`` nodes have degree ``k``."""

    counts: dict[int, int] = field(default_factory=dict)
    n: int = 0

    def __post_init__(self):
        if sum(self.counts.values()) != self.n:
            raise ValueError("histogram counts do not sum to n")

    @classmethod
    def from_degrees(cls, degrees) -> "DegreeHistogram":
        counts = Counter(int(k) for k in degrees)
        return cls(dict(sorted(counts.items())), sum(counts.values()))

    @classmethod
    def from_counts(cls, counts: dict[int, int]) -> "DegreeHistogram":
        counts = {int(k): int(v) for k, v in sorted(counts.items()) if v > 0}
        return cls(counts, sum(counts.values()))

    def fractions(self) -> dict[int, float]:
        """Empirical ``p_k = n_k / n``."""
        if self.n == 0:
            return {}
        return {k: v / self.n for k, v in self.counts.items()}

    def mean_degree(self) -> float:
        if self.n == 0:
            raise ValueError("mean degree of an empty histogram")
        return sum(k * v for k, v in self.counts.items()) / self.n

    def max_degree(self) -> int:
        return max(self.counts) if self.counts else 0

    def __len__(self):
        return len(self.counts)


class DynamicGraph:
    """Undirected multigraph with loan-labelled edges and no id reuse.

    Node ids are dense integers handed out by :meth:`add_node`; a deleted id
    is never handed out again.  Edge ids are internal and likewise never
    reused.

    >>> g = DynamicGraph()
    >>> b, l = g.add_node(), g.add_node()
    >>> g.add_edge(b, l, "loan-1")
    0
    >>> g.degree(b), g.m
    (1, 1)
    >>> g.remove_loan("loan-1")
    [0, 1]
    >>> g.n
    0
    """

    __slots__ = (
        "_adj", "_edges", "_by_label", "_next_node", "_next_edge",
        "_node_ids", "_node_slot", "_edge_ids", "_edge_slot", "_n_isolated",
    )

    def __init__(self):
        # node -> {edge id: neighbour}; len() of the inner dict is the degree
        self._adj: dict[int, dict[int, int]] = {}
        self._edges: dict[int, tuple[int, int, Hashable]] = {}
        self._by_label: dict[Hashable, dict[int, None]] = {}
        self._next_node = 0
        self._next_edge = 0
        self._node_ids: list[int] = []
        self._node_slot: dict[int, int] = {}
        self._edge_ids: list[int] = []
        self._edge_slot: dict[int, int] = {}
        self._n_isolated = 0

    # -- size and queries -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def n_isolated(self) -> int:
        """Number of nodes with degree 0."""
        return self._n_isolated

    def __contains__(self, v) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def nodes(self) -> Iterator[int]:
        return iter(self._adj)

    def degree(self, v: int) -> int:
        try:
            return len(self._adj[v])
        except KeyError:
            raise GraphError(f"unknown node {v}") from None

    def degrees(self) -> dict[int, int]:
        return {v: len(inc) for v, inc in self._adj.items()}

    def neighbors(self, v: int) -> list[tuple[int, Hashable]]:
        """Multiset of ``(neighbour, label)`` pairs incident to ``v``."""
        if v not in self._adj:
            raise GraphError(f"unknown node {v}")
        return [(w, self._edges[e][2]) for e, w in self._adj[v].items()]

    def edges(self) -> Iterator[tuple[int, int, Hashable]]:
        return iter(self._edges.values())

    def labels(self) -> Iterator[Hashable]:
        return iter(self._by_label)

    def loan_edges(self, label: Hashable) -> list[tuple[int, int]]:
        return [self._edges[e][:2] for e in self._by_label.get(label, ())]

    # -- mutation ---------------------------------------------------------

    def add_node(self) -> int:
        v = self._next_node
        self._next_node += 1
        self._adj[v] = {}
        self._node_slot[v] = len(self._node_ids)
        self._node_ids.append(v)
        self._n_isolated += 1
        return v

    def add_edge(self, u: int, v: int, label: Hashable) -> int:
        """Add one ``u``-``v`` relationship created by loan ``label``.

        Returns the internal edge id.
        """
        if u == v:
            raise GraphError(f"self-loop on node {u}")
        adj = self._adj
        if u not in adj or v not in adj:
            raise GraphError(f"unknown node {u if u not in adj else v}")
        e = self._next_edge
        self._next_edge += 1
        au, av = adj[u], adj[v]
        if not au:
            self._n_isolated -= 1
        if not av:
            self._n_isolated -= 1
        au[e] = v
        av[e] = u
        self._edges[e] = (u, v, label)
        bucket = self._by_label.get(label)
        if bucket is None:
            self._by_label[label] = {e: None}
        else:
            bucket[e] = None
        self._edge_slot[e] = len(self._edge_ids)
        self._edge_ids.append(e)
        return e

    def add_star(self, u: int, targets, label: Hashable) -> None:
        """Add one ``u``-``w`` edge per ``w`` in ``targets``, all labelled ``label``.

        Same result as repeated :meth:`add_edge`, with less per-edge overhead.
        """
        adj, edges = self._adj, self._edges
        if u not in adj:
            raise GraphError(f"unknown node {u}")
        au = adj[u]
        bucket = self._by_label.setdefault(label, {})
        edge_ids, edge_slot = self._edge_ids, self._edge_slot
        e = self._next_edge
        for w in targets:
            if w == u:
                raise GraphError(f"self-loop on node {u}")
            aw = adj.get(w)
            if aw is None:
                raise GraphError(f"unknown node {w}")
            if not au:
                self._n_isolated -= 1
            if not aw:
                self._n_isolated -= 1
            au[e] = w
            aw[e] = u
            edges[e] = (u, w, label)
            bucket[e] = None
            edge_slot[e] = len(edge_ids)
            edge_ids.append(e)
            e += 1
        self._next_edge = e
        if not bucket:
            del self._by_label[label]

    def _drop_edge(self, e: int, keep_label_index: bool = False) -> tuple[int, int]:
        u, v, label = self._edges.pop(e)
        au, av = self._adj[u], self._adj[v]
        del au[e]
        del av[e]
        if not au:
            self._n_isolated += 1
        if not av:
            self._n_isolated += 1
        if not keep_label_index:
            bucket = self._by_label[label]
            del bucket[e]
            if not bucket:
                del self._by_label[label]
        slot = self._edge_slot.pop(e)
        last = self._edge_ids.pop()
        if last != e:
            self._edge_ids[slot] = last
            self._edge_slot[last] = slot
        return u, v

    def _drop_node(self, v: int):
        del self._adj[v]
        self._n_isolated -= 1
        slot = self._node_slot.pop(v)
        last = self._node_ids.pop()
        if last != v:
            self._node_ids[slot] = last
            self._node_slot[last] = slot

    def remove_node(self, v: int) -> list[int]:
        """Remove ``v`` and all its incident edges.

        Neighbours lose one degree per removed edge but are never removed
        themselves, even if they end up isolated.  Returns the former
        neighbours, one entry per removed edge.
        """
        inc = self._adj.get(v)
        if inc is None:
            raise GraphError(f"unknown node {v}")
        nbrs = list(inc.values())
        for e in list(inc):
            self._drop_edge(e)
        self._drop_node(v)
        return nbrs

    def remove_loan(self, label: Hashable) -> list[int]:
        """Delete every edge created by loan ``label``.

        Endpoints left without any relationship are removed from the graph
        and returned in ascending id order.  An unknown label is a no-op.
        """
        bucket = self._by_label.pop(label, None)
        if bucket is None:
            return []
        touched = set()
        for e in bucket:
            touched.update(self._drop_edge(e, keep_label_index=True))
        removed = sorted(v for v in touched if not self._adj[v])
        for v in removed:
            self._drop_node(v)
        return removed

    # -- sampling support -------------------------------------------------

    def random_node(self, rng) -> int:
        """Uniformly random live node (``rng`` is a :class:`random.Random`)."""
        ids = self._node_ids
        return ids[int(rng.random() * len(ids))]

    def random_endpoint(self, rng) -> int:
        """Endpoint of a uniformly random edge end: node ``i`` is returned with
        probability ``degree(i) / 2m``."""
        ids = self._edge_ids
        j = int(rng.random() * 2 * len(ids))
        return self._edges[ids[j >> 1]][j & 1]

    # -- summaries --------------------------------------------------------

    def degree_histogram(self) -> DegreeHistogram:
        return DegreeHistogram.from_degrees(len(inc) for inc in self._adj.values())

    def average_degree(self) -> float:
        """``2m / n``."""
        if not self._adj:
            raise GraphError("average degree of an empty graph")
        return 2 * len(self._edges) / len(self._adj)

    def check(self):
        """Assert internal consistency; meant for tests and debugging."""
        deg_sum = sum(len(inc) for inc in self._adj.values())
        assert deg_sum == 2 * self.m, "handshake violated"
        for e, (u, v, label) in self._edges.items():
            assert u != v
            assert self._adj[u][e] == v and self._adj[v][e] == u
            assert e in self._by_label[label]
        assert sum(len(b) for b in self._by_label.values()) == self.m
        assert sorted(self._node_ids) == sorted(self._adj)
        assert sorted(self._edge_ids) == sorted(self._edges)
        assert all(self._node_ids[s] == v for v, s in self._node_slot.items())
        assert all(self._edge_ids[s] == e for e, s in self._edge_slot.items())
        assert self._n_isolated == sum(1 for inc in self._adj.values() if not inc)


def degree_histogram(g: DynamicGraph) -> DegreeHistogram:
    return g.degree_histogram()


def average_degree(g: DynamicGraph) -> float:
    return g.average_degree()
