"""Incremental density-based clustering engine.

Items are added one at a time. Every distance computed while linking an item
into the HNSW is tapped and used twice: it updates both endpoints' nearest
neighbor heaps (which define core distances) and it feeds candidate edges of
the mutual-reachability graph into a bounded buffer. When the buffer
outgrows ``alpha * n`` entries it is folded into the approximate minimum
spanning forest with Kruskal's algorithm. Clustering at any point flushes
the buffer and extracts the hierarchy from the forest.

Whenever an item's heap changes, the edges to its current heap members (and
to the entry just evicted, if any) are re-pushed with freshly settled core
distances. This keeps every computed pair's best-known weight converging to
its exact mutual reachability distance, so the final forest is a true
minimum spanning forest of the reachability graph restricted to computed
pairs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .hierarchy import build_dendrogram, condense, extract_flat
from .hnsw import Hnsw
from .msf import CandidateBuffer, Msf, should_flush, update_msf
from .neighbors import NeighborStore

__all__ = ["Config", "ClusterResult", "FISHDBC", "setup"]


@dataclass
class Config:
    """Engine parameters. ``None`` fields are derived from ``minpts``."""

    minpts: int = 10
    ef: int = 20
    min_cluster_size: int = None
    alpha: float = 32.0
    hnsw_m: int = None
    hnsw_m0: int = None
    level_mult: float = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.min_cluster_size is None:
            self.min_cluster_size = self.minpts
        if self.hnsw_m is None:
            self.hnsw_m = self.minpts
        if self.hnsw_m0 is None:
            self.hnsw_m0 = 2 * self.hnsw_m
        if self.level_mult is None:
            self.level_mult = 0.0 if self.hnsw_m == 1 else 1.0 / math.log(self.hnsw_m)
        self.validate()

    def validate(self):
        if self.minpts < 2:
            raise ValueError(f"minpts must be >= 2 (got {self.minpts})")
        if self.ef < 1:
            raise ValueError(f"ef must be >= 1 (got {self.ef})")
        if self.min_cluster_size < 2:
            raise ValueError(
                f"min_cluster_size must be >= 2 (got {self.min_cluster_size})"
            )
        if self.alpha < 1:
            raise ValueError(f"alpha must be >= 1 (got {self.alpha})")
        if self.hnsw_m < 1:
            raise ValueError(f"hnsw_m must be >= 1 (got {self.hnsw_m})")
        if self.hnsw_m0 < 1:
            raise ValueError(f"hnsw_m0 must be >= 1 (got {self.hnsw_m0})")
        if self.level_mult < 0:
            raise ValueError(f"level_mult must be >= 0 (got {self.level_mult})")


@dataclass
class ClusterResult:
    """Flat labels (-1 = noise) plus the condensed tree they came from."""

    labels: np.ndarray
    condensed: "CondensedTree"

    @property
    def n_clusters(self):
        return len(self.condensed.selected_ids())

    @property
    def n_clustered(self):
        return int((self.labels >= 0).sum())


class FISHDBC:
    """Incremental clustering engine over arbitrary payloads.

    ``distance`` is any symmetric non-negative function of two payloads;
    no triangle inequality is assumed. Single writer: ``add``, ``flush`` and
    ``cluster`` must not run concurrently.
    """

    def __init__(self, distance, config=None, *, record_pairs=False, **overrides):
        if config is None:
            config = Config(**overrides)
        elif overrides:
            raise TypeError("pass either a Config or keyword overrides, not both")
        self.config = config
        self._distance = distance
        self._items = []
        self._rng = np.random.default_rng(config.rng_seed)
        self._hnsw = Hnsw(
            distance,
            self._items,
            m=config.hnsw_m,
            m0=config.hnsw_m0,
            ef=config.ef,
            level_mult=config.level_mult,
            rng=self._rng,
        )
        self._neighbors = NeighborStore(config.minpts)
        self._buf = CandidateBuffer()
        self._msf = Msf()
        self._distance_calls = 0
        self._pairs = {} if record_pairs else None
        self.last_add_pushes = 0

    def __len__(self):
        return len(self._items)

    @property
    def n(self):
        return len(self._items)

    @property
    def distance_calls(self):
        """Total raw distance evaluations performed so far."""
        return self._distance_calls

    @property
    def candidate_count(self):
        return len(self._buf)

    @property
    def items(self):
        return self._items

    def core_distance(self, x):
        return self._neighbors.core_distance(x)

    def pair_log(self):
        """All computed pairs as {(i, j): distance}, i < j.

        Only available when the engine was created with record_pairs=True.
        """
        if self._pairs is None:
            raise RuntimeError("engine was not created with record_pairs=True")
        return {(k >> 32, k & 0xFFFFFFFF): v for k, v in self._pairs.items()}

    def forest_edges(self):
        """Edges currently in the spanning forest (may lag the buffer)."""
        return self._msf.edges()

    def dump_forest(self, fileobj):
        self._msf.dump(fileobj)

    def add(self, payload):
        """Insert one item; returns its dense integer id.

        A distance function failure (NaN, negative, non-finite) aborts the
        insertion with no state change.
        """
        x = len(self._items)
        self._items.append(payload)
        try:
            triples, raw = self._hnsw.insert(x)
        except BaseException:
            self._items.pop()
            raise
        self._distance_calls += raw
        ns = self._neighbors
        ns.register(x)

        # Phase 1: heap updates for both endpoints of every triple. Track
        # whose top-minpts set changed and what fell out.
        changed = {}
        evictions = []
        for a, b, v in triples:
            improved, ev = ns.observe(a, b, v)
            if improved:
                changed[a] = True
                if ev is not None:
                    evictions.append((a, ev[0], ev[1]))
            improved, ev = ns.observe(b, a, v)
            if improved:
                changed[b] = True
                if ev is not None:
                    evictions.append((b, ev[0], ev[1]))

        if self._pairs is not None:
            log = self._pairs
            for a, b, v in triples:
                key = (a << 32) | b
                cur = log.get(key)
                if cur is None or v < cur:
                    log[key] = v

        # Phase 2: candidate edges, all weighted with the settled cores.
        buf = self._buf
        core = ns.core_distance
        before = len(buf)
        for a, b, v in triples:
            w = v
            c = core(a)
            if c > w:
                w = c
            c = core(b)
            if c > w:
                w = c
            buf.push(a, b, w)
        for y in changed:
            cy = core(y)
            for z, d in ns.members(y):
                w = d if d > cy else cy
                cz = core(z)
                if cz > w:
                    w = cz
                buf.push(y, z, w)
        for y, z, d in evictions:
            w = d
            c = core(y)
            if c > w:
                w = c
            c = core(z)
            if c > w:
                w = c
            buf.push(y, z, w)
        self.last_add_pushes = len(buf) - before

        if should_flush(len(buf), len(self._items), self.config.alpha):
            self.flush()
        return x

    def add_many(self, payloads):
        return [self.add(p) for p in payloads]

    def flush(self):
        """Fold buffered candidate edges into the spanning forest.

        Callable at any idle point between adds; a no-op on an empty buffer.
        """
        if len(self._buf):
            update_msf(self._msf, self._buf, len(self._items))

    def cluster(self, min_cluster_size=None):
        """Extract the hierarchy and a flat labeling from the current state.

        Repeatable: without intervening adds, repeated calls return
        identical results.
        """
        if not self._items:
            raise ValueError("nothing to cluster: no items added")
        m_cs = (
            self.config.min_cluster_size
            if min_cluster_size is None
            else min_cluster_size
        )
        if m_cs < 2:
            raise ValueError(f"min cluster size must be >= 2 (got {m_cs})")
        self.flush()
        n = len(self._items)
        dend = build_dendrogram(self._msf.lo, self._msf.hi, self._msf.weight, n)
        tree = condense(dend, m_cs)
        flat = extract_flat(tree)
        return ClusterResult(labels=flat.labels, condensed=tree)


def setup(distance, config=None, **overrides):
    """Create a fresh engine; kept as a named entry point for symmetry."""
    return FISHDBC(distance, config, **overrides)
