"""Voter network representation and dataset ingestion.

A SocialGraph is a directed graph over densely indexed voters.  Edge weights
model influence: b_uv is how strongly u sways v, and the weights entering any
node sum to at most 1 so they can double as live-edge selection probabilities.
Graphs are immutable once built; every "mutation" returns a new instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DataError
from .rng import DOMAIN_NODE_BUDGET, substream

PROB_TOL = 1e-9

_COMMENT_PREFIXES = ("%", "#")


class SocialGraph:
    """Directed voter graph; weighted once influence weights are assigned.

    Invariants enforced at construction: no self-loops, no duplicate
    (source, target) pairs, weights strictly positive, and per-node incoming
    weight sums <= 1 (+1e-9).  A graph built straight from an edge list is an
    unweighted skeleton; diffusion operations require assign_random_weights
    (or with_weights) first.
    """

    def __init__(
        self,
        node_count: int,
        edges: Iterable[tuple[int, int]] | Iterable[tuple[int, int, float]],
        weights: Sequence[float] | None = None,
        node_ids: Sequence[str] | None = None,
    ):
        if node_count < 0:
            raise ValueError("node_count must be nonnegative")
        self.node_count = int(node_count)

        pairs = []
        wlist = [] if weights is None else None
        for e in edges:
            if len(e) == 3:
                u, v, w = e
                if weights is not None:
                    raise ValueError("weights given both inline and as a sequence")
                if wlist is None:
                    wlist = []
                wlist.append(float(w))
            else:
                u, v = e
            pairs.append((int(u), int(v)))
        if weights is not None:
            wlist = [float(w) for w in weights]
        if wlist is not None and len(wlist) != len(pairs):
            raise ValueError("weights length does not match edge count")

        src = np.asarray([p[0] for p in pairs], dtype=np.int64)
        dst = np.asarray([p[1] for p in pairs], dtype=np.int64)
        w = None if wlist is None else np.asarray(wlist, dtype=np.float64)

        if len(src) and (src.min() < 0 or dst.min() < 0):
            raise ValueError("negative node index")
        if len(src) and (src.max() >= node_count or dst.max() >= node_count):
            raise ValueError("node index out of range")
        if np.any(src == dst):
            raise ValueError("self-loops are not allowed")

        # Zero-weight edges carry no influence and can never be live; drop
        # them so the strict-positivity invariant holds (b_bar = 1 case).
        if w is not None:
            if np.any(w < 0.0):
                raise ValueError("edge weights must be nonnegative")
            keep = w > 0.0
            src, dst, w = src[keep], dst[keep], w[keep]

        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        if w is not None:
            w = w[order]
        if len(src) > 1:
            same = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if np.any(same):
                i = int(np.nonzero(same)[0][0])
                raise ValueError(f"duplicate edge ({src[i]}, {dst[i]})")

        self.edge_src = src
        self.edge_dst = dst
        self.edge_weight = w
        self.node_ids = tuple(node_ids) if node_ids is not None else None
        if self.node_ids is not None and len(self.node_ids) != self.node_count:
            raise ValueError("node_ids length does not match node_count")

        # CSR-style adjacency in both directions.
        n, e = self.node_count, len(src)
        in_order = np.lexsort((src, dst))
        self._in_order = in_order
        self.in_indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.in_indptr, dst + 1, 1)
        np.cumsum(self.in_indptr, out=self.in_indptr)
        self.in_src = src[in_order]
        self.in_weight = None if w is None else w[in_order]

        self.out_indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.out_indptr, src + 1, 1)
        np.cumsum(self.out_indptr, out=self.out_indptr)
        self.out_dst = dst  # already sorted by (src, dst)
        self.out_weight = w

        if w is not None:
            sums = np.zeros(n, dtype=np.float64)
            np.add.at(sums, dst, w)
            bad = np.nonzero(sums > 1.0 + PROB_TOL)[0]
            if len(bad):
                v = int(bad[0])
                raise ValueError(
                    f"incoming weights of node {v} sum to {sums[v]:.12g} > 1"
                )
            self._in_weight_sums = sums
        else:
            self._in_weight_sums = None

        for arr in (self.edge_src, self.edge_dst, self.in_src, self.out_dst,
                    self.in_indptr, self.out_indptr):
            arr.setflags(write=False)
        if w is not None:
            for arr in (self.edge_weight, self.in_weight, self._in_weight_sums):
                arr.setflags(write=False)
        self._weight_matrix_t = None
        _ = e  # length retained implicitly via arrays

    # -- basic accessors ---------------------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self.edge_src)

    @property
    def is_weighted(self) -> bool:
        return self.edge_weight is not None

    def require_weighted(self) -> None:
        if not self.is_weighted:
            raise ValueError("operation requires a weighted graph; assign weights first")

    def edges(self) -> list[tuple[int, int]] | list[tuple[int, int, float]]:
        if self.edge_weight is None:
            return list(zip(self.edge_src.tolist(), self.edge_dst.tolist()))
        return list(zip(self.edge_src.tolist(), self.edge_dst.tolist(),
                        self.edge_weight.tolist()))

    def in_edges(self, v: int) -> tuple[np.ndarray, np.ndarray | None]:
        lo, hi = self.in_indptr[v], self.in_indptr[v + 1]
        w = None if self.in_weight is None else self.in_weight[lo:hi]
        return self.in_src[lo:hi], w

    def out_edges(self, v: int) -> tuple[np.ndarray, np.ndarray | None]:
        lo, hi = self.out_indptr[v], self.out_indptr[v + 1]
        w = None if self.out_weight is None else self.out_weight[lo:hi]
        return self.out_dst[lo:hi], w

    def in_degree(self, v: int) -> int:
        return int(self.in_indptr[v + 1] - self.in_indptr[v])

    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def in_weight_sum(self, v: int) -> float:
        if self._in_weight_sums is None:
            raise ValueError("graph is unweighted")
        return float(self._in_weight_sums[v])

    def neighbors(self, v: int) -> set[int]:
        """Undirected neighbor set: union of in- and out-neighbors."""
        ins, _ = self.in_edges(v)
        outs, _ = self.out_edges(v)
        return set(ins.tolist()) | set(outs.tolist())

    def weight_matrix_t(self) -> sp.csr_matrix:
        """Transposed weight matrix (entry [v, u] = b_uv), cached.

        Shaped for mass computations: given an active 0/1 matrix X with one
        row per trial, (W_t @ X.T).T[k, v] is the incoming active weight of v
        in trial k.
        """
        self.require_weighted()
        if self._weight_matrix_t is None:
            n = self.node_count
            m = sp.csr_matrix(
                (self.edge_weight, (self.edge_dst, self.edge_src)), shape=(n, n)
            )
            self._weight_matrix_t = m
        return self._weight_matrix_t

    def with_weights(self, weights: Sequence[float]) -> "SocialGraph":
        """Return a weighted copy; weights are per edge in (src, dst) order."""
        return SocialGraph(
            self.node_count,
            list(zip(self.edge_src.tolist(), self.edge_dst.tolist())),
            weights=weights,
            node_ids=self.node_ids,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SocialGraph):
            return NotImplemented
        if self.node_count != other.node_count:
            return False
        if not (np.array_equal(self.edge_src, other.edge_src)
                and np.array_equal(self.edge_dst, other.edge_dst)):
            return False
        if (self.edge_weight is None) != (other.edge_weight is None):
            return False
        if self.edge_weight is not None:
            return np.array_equal(self.edge_weight, other.edge_weight)
        return True

    def __repr__(self) -> str:
        kind = "weighted" if self.is_weighted else "skeleton"
        return f"SocialGraph({self.node_count} nodes, {self.edge_count} edges, {kind})"


class PreferenceProfile:
    """Per-voter probability distribution over the m candidates."""

    def __init__(self, probs: np.ndarray):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim != 2:
            raise ValueError("probs must be a (nodes, candidates) matrix")
        if probs.shape[1] < 1:
            raise ValueError("need at least one candidate")
        if np.any(probs < -PROB_TOL):
            raise ValueError("negative preference probability")
        rows = probs.sum(axis=1)
        if len(rows) and np.any(np.abs(rows - 1.0) > PROB_TOL):
            v = int(np.argmax(np.abs(rows - 1.0)))
            raise ValueError(f"preference row {v} sums to {rows[v]:.12g}, not 1")
        self.probs = probs.copy()
        self.probs.setflags(write=False)

    @property
    def node_count(self) -> int:
        return self.probs.shape[0]

    @property
    def candidate_count(self) -> int:
        return self.probs.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PreferenceProfile):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __repr__(self) -> str:
        return f"PreferenceProfile({self.node_count} nodes, {self.candidate_count} candidates)"


@dataclass(frozen=True)
class NodeLabeling:
    """Ground-truth node categories; categories map 1:1 to candidates."""

    categories: tuple[str, ...]
    label_index: np.ndarray  # (n,) int, index into categories

    def __post_init__(self):
        idx = np.asarray(self.label_index, dtype=np.int64)
        if len(idx) and (idx.min() < 0 or idx.max() >= len(self.categories)):
            raise ValueError("label index out of range")
        idx.setflags(write=False)
        object.__setattr__(self, "label_index", idx)

    @property
    def node_count(self) -> int:
        return len(self.label_index)

    def label_of(self, v: int) -> str:
        return self.categories[int(self.label_index[v])]


# -- ingestion --------------------------------------------------------------


def _data_lines(path: str | Path):
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot read {p}: {e}") from e
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(_COMMENT_PREFIXES):
            continue
        yield lineno, line


def load_edge_list(path: str | Path, directed: bool) -> SocialGraph:
    """Load an unweighted graph skeleton from `<src> <dst>` lines.

    Node identifiers are arbitrary strings and get remapped to dense 0-based
    indices in order of first appearance (the mapping is kept on the graph as
    node_ids).  Undirected input expands each line into both directions.
    Self-loops are dropped and duplicate edges merged.
    """
    index: dict[str, int] = {}
    ids: list[str] = []
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []

    def idx(token: str) -> int:
        i = index.get(token)
        if i is None:
            i = len(ids)
            index[token] = i
            ids.append(token)
        return i

    for lineno, line in _data_lines(path):
        tokens = line.split()
        if len(tokens) != 2:
            raise DataError(
                f"{path}: line {lineno}: expected two node identifiers, got {len(tokens)}"
            )
        u, v = idx(tokens[0]), idx(tokens[1])
        if u == v:
            continue
        arcs = ((u, v), (v, u)) if not directed else ((u, v),)
        for arc in arcs:
            if arc not in seen:
                seen.add(arc)
                edges.append(arc)

    if len(index) != len(ids) or len(set(ids)) != len(ids):
        raise DataError(f"{path}: node identifier collision after remap")
    return SocialGraph(len(ids), edges, node_ids=ids)


def load_labels(path: str | Path, graph: SocialGraph) -> NodeLabeling:
    """Load `<node> <label>` lines for every node of the graph.

    Categories are ordered by first appearance in the file.
    """
    if graph.node_ids is None:
        raise ValueError("graph carries no node identifier map")
    id_to_index = {s: i for i, s in enumerate(graph.node_ids)}
    categories: list[str] = []
    cat_index: dict[str, int] = {}
    label_idx = np.full(graph.node_count, -1, dtype=np.int64)

    for lineno, line in _data_lines(path):
        parts = line.split(maxsplit=1)
        if len(parts) != 2:
            raise DataError(f"{path}: line {lineno}: expected `<node> <label>`")
        node_id, label = parts[0], parts[1].strip()
        if node_id not in id_to_index:
            raise DataError(f"{path}: line {lineno}: unknown node identifier {node_id!r}")
        c = cat_index.get(label)
        if c is None:
            c = len(categories)
            cat_index[label] = c
            categories.append(label)
        v = id_to_index[node_id]
        if label_idx[v] not in (-1, c):
            raise DataError(f"{path}: line {lineno}: conflicting label for node {node_id!r}")
        label_idx[v] = c

    missing = np.nonzero(label_idx < 0)[0]
    if len(missing):
        names = ", ".join(graph.node_ids[int(v)] for v in missing[:5])
        raise DataError(f"{path}: {len(missing)} node(s) missing a label (e.g. {names})")
    return NodeLabeling(tuple(categories), label_idx)


def init_preferences(graph: SocialGraph, labeling: NodeLabeling) -> PreferenceProfile:
    """Initial preferences proportional to same-labeled neighbors.

    pi_v(c) = |N_v intersect B_c| / |N_v| over the undirected neighbor set.
    Isolated nodes get the uniform distribution.
    """
    if labeling.node_count != graph.node_count:
        raise ValueError("labeling does not cover the graph")
    n, m = graph.node_count, len(labeling.categories)
    probs = np.zeros((n, m), dtype=np.float64)
    for v in range(n):
        nbrs = graph.neighbors(v)
        if not nbrs:
            probs[v, :] = 1.0 / m
            continue
        counts = np.zeros(m, dtype=np.float64)
        for u in nbrs:
            counts[labeling.label_index[u]] += 1.0
        probs[v, :] = counts / len(nbrs)
    return PreferenceProfile(probs)


# -- influence weight assignment ---------------------------------------------


def assign_weights_from_budgets(graph: SocialGraph, b_bar: np.ndarray) -> SocialGraph:
    """Split each node's remaining influence (1 - b_bar_v) evenly over its
    incoming edges: b_uv = (1 - b_bar_v) / indeg(v)."""
    b_bar = np.asarray(b_bar, dtype=np.float64)
    if b_bar.shape != (graph.node_count,):
        raise ValueError("b_bar must have one entry per node")
    if np.any((b_bar < 0.0) | (b_bar > 1.0)):
        raise ValueError("b_bar entries must lie in [0, 1]")
    indeg = graph.in_degrees().astype(np.float64)
    share = np.zeros(graph.node_count, dtype=np.float64)
    has_in = indeg > 0
    share[has_in] = (1.0 - b_bar[has_in]) / indeg[has_in]
    weights = share[graph.edge_dst]
    return graph.with_weights(weights)


def assign_random_weights(graph: SocialGraph, rng_seed: int) -> SocialGraph:
    """Draw each node's non-incoming influence weight b_bar_v uniformly in
    [0, 1] from a stream keyed by (rng_seed, v), then split the remainder."""
    n = graph.node_count
    b_bar = np.empty(n, dtype=np.float64)
    for v in range(n):
        b_bar[v] = substream(rng_seed, DOMAIN_NODE_BUDGET, v).random()
    return assign_weights_from_budgets(graph, b_bar)
