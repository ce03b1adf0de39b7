import math

import numpy as np
import pytest

from nomasel import (Algorithm, ChannelRealization, a3_select, aia_select,
                     derive_params, exhaustive_search, noma_rates, oma_select,
                     random_select, row_maxima, trial_stream)

H_EXAMPLE = np.array([[1.0, 3.0], [2.0, 0.5]])
G_EXAMPLE = np.array([[2.5, 1.0], [4.0, 0.2]])


def example_ch():
    return ChannelRealization(h=H_EXAMPLE.copy(), g=G_EXAMPLE.copy())


def random_ch(rng, n=None, m=None, k=None):
    n = n or int(rng.integers(1, 5))
    m = m or int(rng.integers(1, 5))
    k = k or int(rng.integers(1, 5))
    return ChannelRealization(h=rng.exponential(1.0, (n, m)),
                              g=rng.exponential(1.0, (n, k)))


def brute_force_es(ch, p):
    """Re-evaluate the sum-rate of every triple with the scalar rate model."""
    best = (-1.0, None)
    for i in range(ch.h.shape[0]):
        for m in range(ch.h.shape[1]):
            for k in range(ch.g.shape[1]):
                r = noma_rates(ch.h[i, m], ch.g[i, k], p).r_sum
                if r > best[0]:
                    best = (r, (i + 1, m + 1, k + 1))
    return best


def brute_force_max_min_max(ch):
    best = (-1.0, None)
    for i in range(ch.h.shape[0]):
        hm = max(range(ch.h.shape[1]), key=lambda m: (ch.h[i, m], -m))
        gm = max(range(ch.g.shape[1]), key=lambda k: (ch.g[i, k], -k))
        w = min(ch.h[i, hm], ch.g[i, gm])
        if w > best[0]:
            best = (w, (i + 1, hm + 1, gm + 1))
    return best


def brute_force_global_max(ch):
    best = (-1.0, None)
    for i in range(ch.h.shape[0]):
        hm = max(range(ch.h.shape[1]), key=lambda m: (ch.h[i, m], -m))
        gm = max(range(ch.g.shape[1]), key=lambda k: (ch.g[i, k], -k))
        s = max(ch.h[i, hm], ch.g[i, gm])
        if s > best[0]:
            best = (s, (i + 1, hm + 1, gm + 1))
    return best


class TestExhaustiveSearch:
    def test_single_candidate(self):
        ch = ChannelRealization(h=np.array([[2.0]]), g=np.array([[1.0]]))
        res = exhaustive_search(ch, derive_params())
        assert (res.i, res.m, res.k) == (1, 1, 1)
        assert res.op_count == 1

    def test_example_matches_brute_force(self):
        p = derive_params(d1=1.0, d2=1.0, ps_dbm=90.0, sigma_dbm=0.0)  # rho=1e9
        res = exhaustive_search(example_ch(), p)
        _, triple = brute_force_es(example_ch(), p)
        assert (res.i, res.m, res.k) == triple
        assert res.op_count == 8

    def test_random_matches_brute_force(self):
        p = derive_params(d1=1.0, d2=1.0, ps_dbm=30.0, sigma_dbm=0.0)
        rng = np.random.default_rng(10)
        for _ in range(150):
            ch = random_ch(rng)
            res = exhaustive_search(ch, p)
            _, triple = brute_force_es(ch, p)
            assert (res.i, res.m, res.k) == triple

    def test_dominates_heuristics(self):
        p = derive_params()
        rng = np.random.default_rng(11)
        for _ in range(200):
            ch = random_ch(rng)
            ch = ChannelRealization(h=ch.h / p.omega_h, g=ch.g / p.omega_g)
            es = noma_rates(*_gains(ch, exhaustive_search(ch, p)), p).r_sum
            for sel in (aia_select(ch), a3_select(ch),
                        random_select((ch.h.shape[0], ch.h.shape[1], ch.g.shape[1]),
                                      trial_stream(5, 0), ch)):
                alt = noma_rates(*_gains(ch, sel), p).r_sum
                assert es >= alt - 1e-12


def _gains(ch, sel):
    return ch.h[sel.i - 1, sel.m - 1], ch.g[sel.i - 1, sel.k - 1]


class TestAiaSelect:
    def test_single_candidate(self):
        ch = ChannelRealization(h=np.array([[2.0]]), g=np.array([[1.0]]))
        res = aia_select(ch)
        assert (res.i, res.m, res.k) == (1, 1, 1)

    def test_hand_trace(self):
        res = aia_select(example_ch())
        assert (res.i, res.m, res.k) == (1, 2, 1)
        assert res.gamma_w == 2.5 and res.gamma_s == 3.0
        assert res.algorithm is Algorithm.AIA

    def test_matches_brute_force(self):
        rng = np.random.default_rng(12)
        for _ in range(300):
            ch = random_ch(rng)
            res = aia_select(ch)
            w, triple = brute_force_max_min_max(ch)
            assert (res.i, res.m, res.k) == triple
            assert res.gamma_w == pytest.approx(w, rel=0, abs=0)

    def test_gamma_invariants(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            ch = random_ch(rng)
            res = aia_select(ch)
            h_sel, g_sel = _gains(ch, res)
            assert res.gamma_s == max(h_sel, g_sel)
            assert res.gamma_w == min(h_sel, g_sel)
            assert res.gamma_s >= res.gamma_w >= 0


class TestA3Select:
    def test_hand_trace(self):
        res = a3_select(example_ch())
        assert (res.i, res.m, res.k) == (2, 1, 1)
        assert res.gamma_s == 4.0 and res.gamma_w == 2.0

    def test_gamma_s_is_global_max(self):
        rng = np.random.default_rng(14)
        for _ in range(300):
            ch = random_ch(rng)
            res = a3_select(ch)
            assert res.gamma_s == max(ch.h.max(), ch.g.max())

    def test_matches_brute_force(self):
        rng = np.random.default_rng(15)
        for _ in range(300):
            ch = random_ch(rng)
            res = a3_select(ch)
            _, triple = brute_force_global_max(ch)
            assert (res.i, res.m, res.k) == triple

    def test_shares_stage1_with_aia(self):
        rng = np.random.default_rng(16)
        for _ in range(50):
            ch = random_ch(rng)
            h_max, h_col, g_max, g_col = row_maxima(ch)
            aia, a3 = aia_select(ch), a3_select(ch)
            for res in (aia, a3):
                assert res.m == int(h_col[res.i - 1]) + 1
                assert res.k == int(g_col[res.i - 1]) + 1
                pair = {h_max[res.i - 1], g_max[res.i - 1]}
                assert {res.gamma_s, res.gamma_w} == pair


class TestRandomSelect:
    def test_single_candidate(self):
        res = random_select((1, 1, 1), trial_stream(0, 0))
        assert (res.i, res.m, res.k) == (1, 1, 1)
        assert res.op_count == 0

    def test_deterministic_given_stream(self):
        a = random_select((2, 2, 2), trial_stream(99, 3))
        b = random_select((2, 2, 2), trial_stream(99, 3))
        assert (a.i, a.m, a.k) == (b.i, b.m, b.k)

    def test_uniform_frequencies(self):
        stream = trial_stream(21, 0)
        draws = 100_000
        counts = np.zeros(4)
        for _ in range(draws):
            counts[random_select((4, 2, 2), stream).i - 1] += 1
        sigma = math.sqrt(0.25 * 0.75 / draws)
        assert np.all(np.abs(counts / draws - 0.25) < 4 * sigma)

    def test_indices_in_range(self):
        stream = trial_stream(22, 0)
        for _ in range(500):
            res = random_select((3, 4, 2), stream)
            assert 1 <= res.i <= 3 and 1 <= res.m <= 4 and 1 <= res.k <= 2


class TestOmaSelect:
    def test_example(self):
        res = oma_select(example_ch())
        assert (res.h_best, res.i_h, res.m) == (3.0, 1, 2)
        assert (res.g_best, res.i_g, res.k) == (4.0, 2, 1)

    def test_all_zero(self):
        ch = ChannelRealization(h=np.zeros((2, 2)), g=np.zeros((2, 3)))
        res = oma_select(ch)
        assert res.h_best == 0.0 and res.g_best == 0.0

    def test_single_entries(self):
        ch = ChannelRealization(h=np.array([[0.7]]), g=np.array([[0.3]]))
        res = oma_select(ch)
        assert res.h_best == 0.7 and res.g_best == 0.3


class TestOpCounts:
    def test_es_exact(self):
        rng = np.random.default_rng(17)
        p = derive_params()
        for n, m, k in [(1, 1, 1), (2, 3, 4), (5, 2, 2)]:
            ch = random_ch(rng, n, m, k)
            assert exhaustive_search(ch, p).op_count == n * m * k

    def test_heuristics_linear(self):
        rng = np.random.default_rng(18)
        for n, m, k in [(1, 1, 1), (2, 2, 2), (8, 3, 5), (16, 16, 16)]:
            ch = random_ch(rng, n, m, k)
            expected = n * (m + k) - 1
            assert aia_select(ch).op_count == expected
            assert a3_select(ch).op_count == expected
            assert expected <= 2 * n * (m + k + 3)
