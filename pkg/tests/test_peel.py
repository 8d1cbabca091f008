"""Undirected peeling: densities, thresholds, traces, and bounds."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import densepeel as dp
from densepeel.errors import (
    EmptyGraphError,
    InfeasibleParameterError,
    UndefinedDensityError,
)

from .conftest import k_clique_edges, pass_bound


def k4_stream():
    return dp.EdgeStream.from_edges(k_clique_edges(4))


def refreshed_state(stream):
    state = dp.PeelState.full(stream.n, stream.weighted)
    dp.refresh_degrees(stream, state)
    return state


class TestDensity:
    def test_complete_graph(self):
        assert dp.density(6, 4) == Fraction(3, 2)

    def test_single_edge(self):
        assert dp.density(1, 2) == Fraction(1, 2)

    def test_path(self):
        assert dp.density(2, 3) == Fraction(2, 3)

    def test_weighted_is_float(self):
        assert dp.density(3.5, 2) == pytest.approx(1.75)

    def test_empty_set_rejected(self):
        with pytest.raises(UndefinedDensityError):
            dp.density(0, 0)


class TestRefresh:
    def test_k4_all_alive(self):
        state = refreshed_state(k4_stream())
        assert state.edges_alive == 6
        assert (state.deg == 3).all()

    def test_k4_one_dead(self):
        s = k4_stream()
        state = dp.PeelState.full(s.n, False)
        state.alive[0] = False
        state.n_alive = 3
        dp.refresh_degrees(s, state)
        assert state.edges_alive == 3
        assert state.deg[0] == 0
        assert (state.deg[1:] == 2).all()

    def test_empty_alive_set(self):
        s = k4_stream()
        state = dp.PeelState.full(s.n, False)
        state.alive[:] = False
        state.n_alive = 0
        dp.refresh_degrees(s, state)
        assert state.edges_alive == 0

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(
        st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=40),
        st.integers(0, 1023),
    )
    def test_handshake_property(self, pairs, alive_bits):
        s = dp.EdgeStream.from_edges(pairs, n=10)
        state = dp.PeelState.full(10, False)
        state.alive = np.array([(alive_bits >> i) & 1 == 1 for i in range(10)])
        state.n_alive = int(state.alive.sum())
        dp.refresh_degrees(s, state)
        assert int(state.deg.sum()) == 2 * state.edges_alive


class TestPeelPass:
    def test_k4_regular_all_peel(self):
        state = refreshed_state(k4_stream())
        assert list(dp.peel_pass(state, 0)) == [0, 1, 2, 3]

    def test_star_leaves_peel_center_survives(self):
        s = dp.EdgeStream.from_edges([(0, 1), (0, 2), (0, 3), (0, 4)])
        state = refreshed_state(s)
        assert list(dp.peel_pass(state, 0)) == [1, 2, 3, 4]

    def test_clique_plus_star_first_pass(self):
        s = dp.clique_plus_star(5, 100).to_stream()
        state = refreshed_state(s)
        removal = dp.peel_pass(state, "1/10")
        assert list(removal) == list(range(6, 106))  # the hundred leaves

    def test_path_endpoints_peel(self):
        # threshold 2*(5/4)*(2/3) = 5/3 separates degree 1 from degree 2
        s = dp.EdgeStream.from_edges([(0, 1), (1, 2)])
        state = refreshed_state(s)
        assert list(dp.peel_pass(state, "1/4")) == [0, 2]

    def test_degree_exactly_at_threshold_is_removed(self):
        # K4 at eps=0: threshold 2*rho = 3 equals every degree, so the
        # whole clique peels in one pass (ties count as removable).
        state = refreshed_state(k4_stream())
        assert len(dp.peel_pass(state, 0)) == 4


class TestDensestUndirected:
    def test_clique_plus_star_finds_clique(self):
        s = dp.clique_plus_star(5, 100).to_stream()
        r = dp.densest_undirected(s, "1/10")
        assert r.best_set == (0, 1, 2, 3, 4)
        assert r.best_density == Fraction(2)
        assert r.passes == 3
        assert [row.removed for row in r.trace] == [100, 1, 5]
        assert [row.n_alive for row in r.trace] == [106, 6, 5]

    @pytest.mark.parametrize("eps", ["0", "1/2", "1"])
    def test_regular_graph_one_pass(self, eps):
        r = dp.densest_undirected(k4_stream(), eps)
        assert r.best_set == (0, 1, 2, 3)
        assert r.best_density == Fraction(3, 2)
        assert r.passes == 1

    def test_empty_graph_rejected(self):
        s = dp.EdgeStream.from_edges([], n=3)
        with pytest.raises(EmptyGraphError):
            dp.densest_undirected(s, 0)

    def test_negative_eps_rejected(self):
        with pytest.raises(InfeasibleParameterError):
            dp.densest_undirected(k4_stream(), "-1/2")

    def test_eps_zero_terminates(self):
        s = dp.clique_plus_star(4, 7).to_stream()
        r = dp.densest_undirected(s, 0)
        assert r.best_density == Fraction(3, 2)
        assert r.passes <= s.n

    def test_best_is_trace_maximum(self, er_corpus):
        for g in er_corpus[::13]:
            r = dp.densest_undirected(g.to_stream(), "1/2")
            assert r.best_density == max(row.density for row in r.trace)

    def test_trace_monotone_and_progress(self, er_corpus):
        for g in er_corpus[::13]:
            r = dp.densest_undirected(g.to_stream(), "1/10")
            sizes = [row.n_alive for row in r.trace]
            assert sizes == sorted(sizes, reverse=True)
            assert all(row.removed >= 1 for row in r.trace)

    def test_approximation_bound_sample(self, er_corpus, er_streams, brute_tables):
        for g in er_corpus[::7]:
            opt = brute_tables[g.name][1].optimum
            for eps in (Fraction(0), Fraction(1, 2)):
                r = dp.densest_undirected(er_streams[g.name], eps)
                assert (2 + 2 * eps) * r.best_density >= opt

    def test_inmemory_engine_identical(self, er_corpus, er_streams):
        for g in er_corpus[::9]:
            s = er_streams[g.name]
            for eps in ("0", "1/3"):
                assert dp.densest_undirected(s, eps, engine="inmemory") == (
                    dp.densest_undirected(s, eps)
                )

    def test_weighted_peel_matches_tiny_enumeration(self):
        edges = [(0, 1, 4.0), (1, 2, 1.0), (2, 3, 1.0), (0, 2, 2.0)]
        s = dp.EdgeStream.from_edges(edges)
        r = dp.densest_undirected(s, "1/10")
        best = 0.0
        for mask in range(1, 16):
            nodes = {i for i in range(4) if mask >> i & 1}
            w = sum(w for u, v, w in edges if u in nodes and v in nodes)
            best = max(best, w / len(nodes))
        assert float(r.best_density) >= best / (2 + 2 * 0.1) - 1e-12

    def test_weighted_preferential_attachment_runs(self):
        s = dp.preferential_attachment_weighted(64).to_stream()
        r = dp.densest_undirected(s, "1/2")
        assert r.best_density > 0
        assert r.passes >= 1


class TestDensestAtLeastK:
    def test_two_cliques_keeps_the_big_one(self):
        edges = k_clique_edges(5) + [(5, 6), (5, 7), (6, 7)]
        s = dp.EdgeStream.from_edges(edges)
        r = dp.densest_at_least_k(s, 4, "1/2")
        assert r.best_set == (0, 1, 2, 3, 4)
        assert r.best_density == Fraction(2)
        assert r.passes == 2
        assert [row.removed for row in r.trace] == [3, 2]
        assert r.trace[0].density == Fraction(13, 8)

    def test_k_equals_n(self):
        r = dp.densest_at_least_k(k4_stream(), 4, "1/2")
        assert r.best_set == (0, 1, 2, 3)
        assert r.best_density == Fraction(3, 2)

    def test_isolated_nodes_fill_the_quota(self):
        s = dp.EdgeStream.from_edges(k_clique_edges(4), n=6)
        r = dp.densest_at_least_k(s, 6, "1/2")
        assert r.best_set == (0, 1, 2, 3, 4, 5)
        assert r.best_density == Fraction(1)

    def test_infeasible_k(self):
        with pytest.raises(InfeasibleParameterError):
            dp.densest_at_least_k(k4_stream(), 5, "1/2")

    def test_eps_zero_rejected(self):
        with pytest.raises(InfeasibleParameterError):
            dp.densest_at_least_k(k4_stream(), 2, 0)

    def test_quota_never_exceeds_shrink_goal(self, er_corpus, er_streams):
        eps = Fraction(1, 2)
        for g in er_corpus[::11]:
            r = dp.densest_at_least_k(er_streams[g.name], 1, eps)
            for row in r.trace:
                quota = -((-eps.numerator * row.n_alive) // (eps.numerator + eps.denominator))
                assert row.removed <= max(1, quota)

    def test_bounds_sample(self, er_corpus, er_streams, brute_tables):
        eps = Fraction(1, 2)
        for g in er_corpus[::7]:
            table = brute_tables[g.name]
            for k in range(1, g.n + 1, 3):
                r = dp.densest_at_least_k(er_streams[g.name], k, eps)
                assert len(r.best_set) >= k
                assert (3 + 3 * eps) * r.best_density >= table[k].optimum
                assert r.passes <= pass_bound(g.n, k, eps)

    def test_weighted_run_respects_the_floor(self):
        s = dp.preferential_attachment_weighted(32).to_stream()
        for k in (1, 8, 20, 32):
            r = dp.densest_at_least_k(s, k, "1/2")
            assert len(r.best_set) >= k
            assert float(r.best_density) > 0


class TestDCore:
    def test_k4(self):
        adj = dp.adjacency_from_edges(4, k_clique_edges(4))
        assert dp.d_core(adj, 3) == {0, 1, 2, 3}

    def test_k4_plus_pendant(self):
        adj = dp.adjacency_from_edges(5, k_clique_edges(4) + [(3, 4)])
        assert dp.d_core(adj, 3) == {0, 1, 2, 3}

    def test_d_zero_is_everything(self):
        adj = dp.adjacency_from_edges(4, [(0, 1)])
        assert dp.d_core(adj, 0) == {0, 1, 2, 3}

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(
        st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=30),
        st.integers(0, 5),
    )
    def test_idempotent(self, pairs, d):
        adj = dp.adjacency_from_edges(10, pairs)
        core = dp.d_core(adj, d)
        induced = [set(adj[i]) & core if i in core else set() for i in range(10)]
        assert dp.d_core(induced, d) == core

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(
        st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=30),
        st.integers(1, 4),
    )
    def test_all_degrees_meet_threshold(self, pairs, d):
        adj = dp.adjacency_from_edges(10, pairs)
        core = dp.d_core(adj, d)
        for i in core:
            assert len(set(adj[i]) & core) >= d
