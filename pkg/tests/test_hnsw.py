import math

import numpy as np
import pytest

from fishdbc.distances import DistanceError, euclidean
from fishdbc.hnsw import Hnsw


def make_index(items, m=5, m0=10, ef=20, level_mult=None, seed=0, distance=euclidean):
    if level_mult is None:
        level_mult = 1.0 / math.log(m)
    return Hnsw(
        distance,
        items,
        m=m,
        m0=m0,
        ef=ef,
        level_mult=level_mult,
        rng=np.random.default_rng(seed),
    )


class TestAssignLevel:
    def test_zero_multiplier_always_level_zero(self):
        idx = make_index([], level_mult=0.0)
        assert all(idx.assign_level() == 0 for _ in range(1000))

    def test_unit_draw_gives_level_zero(self):
        class UnitRng:
            def random(self):
                return 0.0  # u = 1 - 0 = 1, ln(1) = 0

        idx = make_index([])
        idx._rng = UnitRng()
        assert idx.assign_level() == 0

    def test_level_distribution(self):
        # With m = 10 about 1/10th of draws should land at level >= 1.
        idx = make_index([], m=10, level_mult=1.0 / math.log(10))
        draws = 100_000
        above = sum(idx.assign_level() >= 1 for _ in range(draws))
        assert 0.08 <= above / draws <= 0.12


class TestInsert:
    def test_empty_insert_no_triples(self):
        items = [np.zeros(2)]
        idx = make_index(items)
        triples, raw = idx.insert(0)
        assert triples == [] and raw == 0
        assert idx._entry == 0

    def test_second_insert_single_triple(self):
        items = [np.array([0.0, 0.0]), np.array([3.0, 4.0])]
        idx = make_index(items)
        idx.insert(0)
        triples, raw = idx.insert(1)
        assert raw == 1
        assert triples == [(0, 1, 5.0)]

    def test_duplicate_id_rejected(self):
        items = [np.zeros(2)]
        idx = make_index(items)
        idx.insert(0)
        with pytest.raises(ValueError, match="already"):
            idx.insert(0)

    def test_layer_membership_is_prefix(self, rng):
        items = [rng.random(3) for _ in range(300)]
        idx = make_index(items, seed=3)
        for i in range(300):
            idx.insert(i)
        for level in range(1, idx.layer_count):
            upper = set(idx._layers[level])
            lower = set(idx._layers[level - 1])
            assert upper <= lower

    def test_adjacency_symmetric_and_degree_capped(self, rng):
        items = [rng.random(3) for _ in range(300)]
        m, m0 = 5, 10
        idx = make_index(items, m=m, m0=m0, seed=4)
        for i in range(300):
            idx.insert(i)
        for level, layer in enumerate(idx._layers):
            cap = m0 if level == 0 else m
            for node, adj in layer.items():
                assert len(adj) <= cap
                for nbr in adj:
                    assert node in layer[nbr]


class TestDistanceTap:
    def test_counter_matches_raw_triples(self, rng):
        calls = [0]

        def counting(a, b):
            calls[0] += 1
            return euclidean(a, b)

        items = [rng.random(4) for _ in range(200)]
        idx = make_index(items, distance=counting, seed=5)
        total_raw = 0
        for i in range(200):
            _, raw = idx.insert(i)
            total_raw += raw
        assert calls[0] == total_raw

    def test_triples_deduplicated_to_minimum(self, rng):
        raw_log = []

        def logging_distance(a, b):
            d = euclidean(a, b)
            raw_log.append(d)
            return d

        items = [rng.random(2) for _ in range(120)]
        idx = make_index(items, distance=logging_distance, seed=6)
        for i in range(120):
            raw_log.clear()
            triples, raw = idx.insert(i)
            assert len(raw_log) == raw
            assert len(triples) <= raw
            seen = {}
            for a, b, v in triples:
                assert a < b
                assert (a, b) not in seen
                seen[(a, b)] = v
                assert v == euclidean(items[a], items[b])

    def test_triple_values_match_distance(self, rng):
        items = [rng.random(3) for _ in range(80)]
        idx = make_index(items, seed=7)
        for i in range(80):
            triples, _ = idx.insert(i)
            for a, b, v in triples:
                assert v == euclidean(items[a], items[b])

    def test_nearest_neighbor_recall(self, rng):
        n = 1000
        points = rng.random((n, 10))
        items = [points[i] for i in range(n)]
        idx = make_index(items, m=10, m0=20, ef=20, seed=8)
        computed = set()
        for i in range(n):
            triples, _ = idx.insert(i)
            for a, b, _ in triples:
                computed.add((a, b))
        # Brute-force true nearest neighbor for every point.
        hits = 0
        for i in range(n):
            d = np.linalg.norm(points - points[i], axis=1)
            d[i] = np.inf
            nn = int(d.argmin())
            pair = (i, nn) if i < nn else (nn, i)
            if pair in computed:
                hits += 1
        assert hits / n >= 0.95

    def test_connectivity_diagnostic(self, rng):
        # Not an assertion target: the triple-log edge set should leave only
        # a handful of components on clusterable data.
        n = 400
        points = rng.random((n, 2))
        items = [points[i] for i in range(n)]
        idx = make_index(items, m=5, m0=10, ef=20, seed=9)
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i in range(n):
            triples, _ = idx.insert(i)
            for a, b, _ in triples:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[rb] = ra
        components = len({find(i) for i in range(n)})
        print(f"triple-log components on 400 uniform points: {components}")
        assert components >= 1


class TestAtomicity:
    def test_failing_distance_leaves_index_unchanged(self, rng):
        items = [rng.random(2) for _ in range(50)]
        idx = make_index(items, seed=10)
        for i in range(49):
            idx.insert(i)
        layers_before = [
            {node: dict(adj) for node, adj in layer.items()} for layer in idx._layers
        ]
        entry_before = idx._entry
        boom = [0]

        def failing(a, b):
            boom[0] += 1
            if boom[0] > 3:
                return float("nan")
            return euclidean(a, b)

        idx._distance = failing
        with pytest.raises(DistanceError):
            idx.insert(49)
        assert idx._entry == entry_before
        assert 49 not in idx
        got = [
            {node: dict(adj) for node, adj in layer.items()} for layer in idx._layers
        ]
        assert got == layers_before

    def test_negative_distance_rejected(self):
        items = [np.zeros(2), np.ones(2)]
        idx = make_index(items, distance=lambda a, b: -1.0)
        idx.insert(0)
        with pytest.raises(DistanceError):
            idx.insert(1)

    def test_infinite_distance_rejected(self):
        items = [np.zeros(2), np.ones(2)]
        idx = make_index(items, distance=lambda a, b: math.inf)
        idx.insert(0)
        with pytest.raises(DistanceError):
            idx.insert(1)
