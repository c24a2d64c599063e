"""Hierarchical navigable small world graph used purely as an insertion engine.

The index is never queried. Its sole job is to link each new item into the
layered neighborhood graph and report every distance evaluated while doing so
as (a, b, d(a, b)) triples for the clustering side to consume. All distance
calls happen before any graph mutation, so a failing distance function leaves
the index untouched.
"""

import heapq
import math

from .distances import DistanceError

__all__ = ["Hnsw"]


class _Recorder:
    """Wraps the distance function; taps, validates and deduplicates calls."""

    __slots__ = ("fn", "items", "raw", "best")

    def __init__(self, fn, items):
        self.fn = fn
        self.items = items
        self.raw = 0
        self.best = {}

    def __call__(self, a, b):
        v = float(self.fn(self.items[a], self.items[b]))
        if not v >= 0.0:  # catches NaN and negatives
            raise DistanceError(f"distance({a}, {b}) returned {v}")
        if math.isinf(v):
            raise DistanceError(f"distance({a}, {b}) returned a non-finite value")
        self.raw += 1
        key = (a, b) if a < b else (b, a)
        cur = self.best.get(key)
        if cur is None or v < cur:
            self.best[key] = v
        return v

    def finish(self):
        triples = [(a, b, v) for (a, b), v in self.best.items()]
        return triples, self.raw


class Hnsw:
    """Insertion-only HNSW over items addressed by dense integer ids.

    ``items`` is a shared sequence of payloads owned by the caller; the id of
    an item is its index in that sequence. ``m`` is the per-layer degree
    target (``m0`` applies to layer 0) and ``ef`` the construction beam width.
    """

    def __init__(self, distance, items, m, m0, ef, level_mult, rng):
        self._distance = distance
        self._items = items
        self._m = m
        self._m0 = m0
        self._ef = ef
        self._level_mult = level_mult
        self._rng = rng
        self._layers = []  # layer 0 first; each: {node: {neighbor: dist}}
        self._levels = {}  # node -> top level
        self._entry = None

    def __len__(self):
        return len(self._levels)

    def __contains__(self, x):
        return x in self._levels

    @property
    def layer_count(self):
        return len(self._layers)

    def assign_level(self):
        u = 1.0 - self._rng.random()  # in (0, 1]
        return int(-math.log(u) * self._level_mult)

    def neighborhood(self, x, layer=0):
        """Current adjacency of x at a layer, as a {neighbor: dist} copy."""
        return dict(self._layers[layer][x])

    def insert(self, x):
        """Link item x into the graph.

        Returns ``(triples, raw_calls)``: the deduplicated list of
        (a, b, distance) triples covering every distance evaluation performed
        (duplicates within the insertion keep the minimum value), and the raw
        number of calls before deduplication.
        """
        if x in self._levels:
            raise ValueError(f"item {x} already inserted")
        rec = _Recorder(self._distance, self._items)
        level = self.assign_level()

        staged = []
        if self._entry is not None:
            ep = self._entry
            ep_dist = rec(x, ep)
            top = len(self._layers) - 1
            for lc in range(top, level, -1):
                ep, ep_dist = self._greedy_search(x, ep, ep_dist, self._layers[lc], rec)
            entry_points = [(-ep_dist, ep)]
            for lc in range(min(level, top), -1, -1):
                layer = self._layers[lc]
                cap = self._m0 if lc == 0 else self._m
                entry_points = self._beam_search(x, entry_points, layer, self._ef, rec)
                candidates = sorted((-nd, node) for nd, node in entry_points)
                selected = self._select_heuristic(candidates, cap, rec)
                x_adj = {node: d for d, node in selected}
                backlinks = {}
                removals = []
                for d_xn, node in selected:
                    adj = layer[node]
                    if len(adj) < cap:
                        merged = dict(adj)
                        merged[x] = d_xn
                        backlinks[node] = merged
                    else:
                        pool = sorted([(dd, p) for p, dd in adj.items()] + [(d_xn, x)])
                        pruned = {p: dd for dd, p in self._select_heuristic(pool, cap, rec)}
                        backlinks[node] = pruned
                        # Adjacency stays symmetric: every link the prune
                        # dropped disappears from the other endpoint too.
                        if x not in pruned:
                            del x_adj[node]
                        for old in adj:
                            if old not in pruned:
                                removals.append((node, old))
                staged.append((lc, x_adj, backlinks, removals))

        # Commit phase: no distance calls from here on.
        for lc, x_adj, backlinks, removals in staged:
            layer = self._layers[lc]
            layer[x] = x_adj
            for node, adj in backlinks.items():
                layer[node] = adj
            for a, b in removals:
                layer[a].pop(b, None)
                layer[b].pop(a, None)
        while len(self._layers) <= level:
            self._layers.append({x: {}})
            self._entry = x
        if self._entry is None:
            self._entry = x
        self._levels[x] = level
        return rec.finish()

    def _greedy_search(self, x, start, start_dist, layer, rec):
        best, best_dist = start, start_dist
        improved = True
        while improved:
            improved = False
            for nbr in layer[best]:
                d = rec(x, nbr)
                if d < best_dist:
                    best, best_dist = nbr, d
                    improved = True
        return best, best_dist

    def _beam_search(self, x, entry_points, layer, ef, rec):
        """Best-first search keeping the ef closest nodes found.

        ``entry_points`` is a heap of (-dist, node); the same representation
        is returned.
        """
        candidates = [(-nd, node) for nd, node in entry_points]
        heapq.heapify(candidates)
        visited = set(node for _, node in entry_points)
        while candidates:
            dist, node = heapq.heappop(candidates)
            worst = -entry_points[0][0]
            if dist > worst:
                break
            for nbr in layer[node]:
                if nbr in visited:
                    continue
                visited.add(nbr)
                d = rec(x, nbr)
                if len(entry_points) < ef:
                    heapq.heappush(candidates, (d, nbr))
                    heapq.heappush(entry_points, (-d, nbr))
                elif d < worst:
                    heapq.heappush(candidates, (d, nbr))
                    heapq.heapreplace(entry_points, (-d, nbr))
                    worst = -entry_points[0][0]
        return entry_points

    def _select_heuristic(self, candidates, cap, rec):
        """Neighbor selection keeping candidates closer to the base point
        than to any already-kept neighbor.

        ``candidates`` must be sorted ascending (dist-to-base, node); the
        kept subset (same representation) is returned.
        """
        if len(candidates) <= cap:
            return list(candidates)
        kept = []
        for d_c, c in candidates:
            if len(kept) >= cap:
                break
            good = True
            for _, k in kept:
                if rec(c, k) < d_c:
                    good = False
                    break
            if good:
                kept.append((d_c, c))
        return kept
