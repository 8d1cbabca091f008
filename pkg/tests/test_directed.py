"""Directed peeling: pair densities, side alternation, and the ratio sweep."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

import densepeel as dp
from densepeel.errors import (
    InfeasibleParameterError,
    StreamModeError,
    UndefinedDensityError,
)


def two_cycle():
    return dp.EdgeStream.from_edges([(0, 1), (1, 0)], directed=True)


def hub_graph():
    # nine leaves, each pointing at node 9
    return dp.EdgeStream.from_edges([(i, 9) for i in range(9)], directed=True)


class TestDensityDirected:
    def test_two_cycle_whole(self):
        assert dp.density_directed(2, 2, 2) == pytest.approx(1.0)

    def test_single_edge_singletons(self):
        assert dp.density_directed(1, 1, 1) == pytest.approx(1.0)

    def test_hub(self):
        assert dp.density_directed(9, 9, 1) == pytest.approx(3.0)

    def test_empty_side_rejected(self):
        with pytest.raises(UndefinedDensityError):
            dp.density_directed(0, 0, 3)


class TestDensestDirected:
    def test_two_cycle_one_pass(self):
        r = dp.densest_directed(two_cycle(), 1, 0)
        assert r.best_density == pytest.approx(1.0)
        assert (r.best_s, r.best_t) == ((0, 1), (0, 1))
        assert r.passes == 1
        assert r.trace[0].removed == 2
        assert r.trace[0].side == "S"

    def test_single_edge_alternates_to_singletons(self):
        s = dp.EdgeStream.from_edges([(0, 1)], directed=True)
        r = dp.densest_directed(s, 1, 0)
        assert r.best_density == pytest.approx(1.0)
        assert (r.best_s, r.best_t) == ((0,), (1,))
        assert [row.side for row in r.trace] == ["S", "T", "S"]
        assert r.trace[0].density == pytest.approx(0.5)
        assert r.trace[1].density == pytest.approx(1 / math.sqrt(2))

    def test_hub_at_matching_ratio(self):
        r = dp.densest_directed(hub_graph(), 9, 0)
        assert r.best_density == pytest.approx(3.0)
        assert r.best_s == tuple(range(9))
        assert r.best_t == (9,)

    def test_undirected_stream_rejected(self):
        s = dp.EdgeStream.from_edges([(0, 1)])
        with pytest.raises(StreamModeError):
            dp.densest_directed(s, 1, 0)

    def test_weighted_stream_rejected(self):
        s = dp.EdgeStream.from_edges([(0, 1, 2.0)], directed=True)
        with pytest.raises(StreamModeError):
            dp.densest_directed(s, 1, 0)

    def test_bad_c_rejected(self):
        with pytest.raises(InfeasibleParameterError):
            dp.densest_directed(two_cycle(), 0, 0)

    def test_each_pass_shrinks_one_side(self, digraph_corpus):
        eps = Fraction(1, 2)
        p, q = eps.numerator, eps.denominator
        for g in digraph_corpus[::9]:
            r = dp.densest_directed(g.to_stream(), 1.0, eps)
            ns, nt = g.n, g.n
            for row in r.trace:
                assert (row.n_s, row.n_t) == (ns, nt)
                side_size = ns if row.side == "S" else nt
                # trimmed side shrinks by more than an eps/(1+eps) fraction
                assert row.removed * (p + q) > p * side_size
                if row.side == "S":
                    ns -= row.removed
                else:
                    nt -= row.removed

    def test_flow_conservation_identity(self, digraph_corpus):
        from densepeel.directed import _refresh_one_side

        for g in digraph_corpus[::17]:
            s = g.to_stream()
            rng = np.random.default_rng(1)
            alive_s = rng.random(g.n) < 0.8
            alive_t = rng.random(g.n) < 0.8
            est_s, outdeg = _refresh_one_side(s, alive_s, alive_t, "S")
            est_t, indeg = _refresh_one_side(s, alive_s, alive_t, "T")
            assert est_s == est_t
            assert int(outdeg.sum()) == est_s
            assert int(indeg.sum()) == est_s
            assert (outdeg[~alive_s] == 0).all()
            assert (indeg[~alive_t] == 0).all()

    def test_recount_matches_reported(self, digraph_corpus):
        from densepeel.directed import _recount_pair

        for g in digraph_corpus[::15]:
            s = g.to_stream()
            r = dp.densest_directed(s, 2.0, "1/2")
            s_mask = np.zeros(g.n, dtype=bool)
            t_mask = np.zeros(g.n, dtype=bool)
            s_mask[list(r.best_s)] = True
            t_mask[list(r.best_t)] = True
            est = _recount_pair(s, s_mask, t_mask)
            assert est == r.edges_in_best
            expect = est / math.sqrt(len(r.best_s) * len(r.best_t))
            assert abs(expect - r.best_density) <= 1e-12


class TestSweep:
    def test_grid_shape(self):
        assert dp.ratio_grid(10, 2) == [0.125, 0.25, 0.5, 1, 2, 4, 8]

    def test_grid_single_node(self):
        assert dp.ratio_grid(1, 2) == [1.0]

    def test_bad_delta(self):
        with pytest.raises(InfeasibleParameterError):
            dp.ratio_grid(10, 1.0)

    def test_two_cycle_sweep(self):
        r = dp.sweep_c(two_cycle(), 2, 0)
        assert r.best_density == pytest.approx(1.0)
        # density ties across the grid resolve toward the smallest ratio
        assert r.c_used == pytest.approx(0.5)

    def test_hub_sweep_hits_the_bound(self):
        r = dp.sweep_c(hub_graph(), 2, 0)
        oracle = dp.brute_force_directed(10, [(i, 9) for i in range(9)])
        assert r.best_density >= oracle.optimum / (2 * 2) - 1e-12
        assert oracle.optimum / r.best_density <= 4 + 1e-12

    def test_sweep_bound_sample(self, digraph_corpus):
        for g in digraph_corpus[::11]:
            oracle = dp.brute_force_directed(g.n, g.edges)
            for eps in (Fraction(0), Fraction(1)):
                r = dp.sweep_c(g.to_stream(), 2.0, eps)
                bound = (2 + 2 * eps) * 2
                lhs = bound * bound * r.edges_in_best**2 * oracle.n_s * oracle.n_t
                rhs = oracle.edges**2 * len(r.best_s) * len(r.best_t)
                assert lhs >= rhs

    def test_sweep_deterministic(self):
        g = dp.erdos_renyi(8, 0.3, 5, directed=True)
        a = dp.sweep_c(g.to_stream(), 2, "1/2")
        b = dp.sweep_c(g.to_stream(), 2, "1/2")
        assert a == b
