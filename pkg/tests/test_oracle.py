from itertools import permutations

import numpy as np
import pytest

from hafnium.errors import OddDimension, TooLarge
from hafnium.oracle import (
    _matching_arrays,
    bipartite_embedding,
    double_factorial,
    hafnian_bruteforce,
    loop_hafnian_bruteforce,
    matching_count_bruteforce,
    permanent_ryser,
    telephone,
)

from conftest import random_symmetric, rel_err

TELEPHONE_PREFIX = [1, 1, 2, 4, 10, 26, 76, 232, 764, 2620, 9496, 35696, 140152]


class TestCounts:
    def test_double_factorial_values(self):
        assert double_factorial(-1) == 1
        assert double_factorial(0) == 1
        assert double_factorial(7) == 105
        assert double_factorial(19) == 654729075

    def test_telephone_recurrence_values(self):
        for n, expected in enumerate(TELEPHONE_PREFIX):
            assert telephone(n) == expected

    def test_telephone_4_matches_spm_listing(self):
        assert telephone(4) == 10

    @pytest.mark.parametrize("n", [2, 4, 6, 8, 10, 12])
    def test_enumeration_sizes(self, n):
        pmp = sum(arr[0].shape[0] for arr in _matching_arrays(n, False))
        spm = sum(arr[0].shape[0] for arr in _matching_arrays(n, True))
        assert pmp == double_factorial(n - 1)
        assert spm == telephone(n)


class TestHafnianBruteforce:
    def test_4x4_three_term_expansion(self):
        b = random_symmetric(4, 100)
        expected = b[0, 1] * b[2, 3] + b[0, 2] * b[1, 3] + b[0, 3] * b[1, 2]
        assert rel_err(hafnian_bruteforce(b), expected) < 1e-14

    def test_all_ones_8(self):
        assert hafnian_bruteforce(np.ones((8, 8))) == 105

    def test_single_edge(self):
        a = 0.3 - 0.9j
        assert hafnian_bruteforce(np.array([[0, a], [a, 0]])) == a

    def test_empty(self):
        assert hafnian_bruteforce(np.zeros((0, 0))) == 1

    def test_guards(self):
        with pytest.raises(OddDimension):
            hafnian_bruteforce(np.zeros((3, 3)))
        with pytest.raises(TooLarge):
            hafnian_bruteforce(np.zeros((18, 18)))


class TestLoopHafnianBruteforce:
    def test_4x4_ten_term_expansion(self):
        b = random_symmetric(4, 101)
        expected = (
            b[0, 1] * b[2, 3] + b[0, 2] * b[1, 3] + b[0, 3] * b[1, 2]
            + b[0, 0] * b[1, 1] * b[2, 3] + b[0, 1] * b[2, 2] * b[3, 3]
            + b[0, 2] * b[1, 1] * b[3, 3] + b[0, 0] * b[2, 2] * b[1, 3]
            + b[0, 0] * b[3, 3] * b[1, 2] + b[0, 3] * b[1, 1] * b[2, 2]
            + b[0, 0] * b[1, 1] * b[2, 2] * b[3, 3]
        )
        assert rel_err(loop_hafnian_bruteforce(b), expected) < 1e-14

    def test_all_ones_with_diagonal_4(self):
        assert loop_hafnian_bruteforce(np.ones((4, 4))) == 10

    def test_zero_diagonal_reduces_to_hafnian(self):
        a = random_symmetric(8, 102)
        np.fill_diagonal(a, 0)
        assert loop_hafnian_bruteforce(a) == hafnian_bruteforce(a)

    def test_guard(self):
        with pytest.raises(TooLarge):
            loop_hafnian_bruteforce(np.zeros((16, 16)))


class TestPermanentRyser:
    def test_identity(self):
        assert permanent_ryser(np.eye(3)) == 1

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
    def test_all_ones_factorial(self, m):
        import math

        assert rel_err(permanent_ryser(np.ones((m, m))), math.factorial(m)) < 1e-12

    def test_random_vs_permutation_sum(self):
        rng = np.random.default_rng(55)
        w = rng.uniform(-1, 1, (4, 4)) + 1j * rng.uniform(-1, 1, (4, 4))
        naive = sum(
            np.prod([w[i, p[i]] for i in range(4)]) for p in permutations(range(4))
        )
        assert rel_err(permanent_ryser(w), naive) < 1e-12

    def test_empty(self):
        assert permanent_ryser(np.zeros((0, 0))) == 1

    def test_guard(self):
        with pytest.raises(TooLarge):
            permanent_ryser(np.zeros((21, 21)))


class TestBipartiteIdentity:
    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
    def test_embedding_hafnian_equals_permanent(self, m):
        rng = np.random.default_rng(m)
        w = rng.uniform(-1, 1, (m, m)) + 1j * rng.uniform(-1, 1, (m, m))
        emb = bipartite_embedding(w)
        assert rel_err(hafnian_bruteforce(emb), permanent_ryser(w)) < 1e-11


class TestMatchingCount:
    def test_single_edge(self):
        assert matching_count_bruteforce(np.array([[0, 1], [1, 0]])) == 2

    def test_k4(self):
        a = np.ones((4, 4), dtype=int) - np.eye(4, dtype=int)
        assert matching_count_bruteforce(a) == 10

    def test_edgeless(self):
        assert matching_count_bruteforce(np.zeros((5, 5), dtype=int)) == 1

    @pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
    def test_equals_unit_diagonal_loop_hafnian(self, n):
        rng = np.random.default_rng(n + 40)
        adj = (rng.uniform(size=(n, n)) < 0.5).astype(int)
        adj = np.triu(adj, 1)
        adj = adj + adj.T
        with_loops = adj.astype(complex) + np.eye(n)
        count = matching_count_bruteforce(adj)
        lhaf = loop_hafnian_bruteforce(with_loops)
        assert round(lhaf.real) == count
        assert abs(lhaf - count) < 1e-9 * max(1, count)

    def test_guard(self):
        with pytest.raises(TooLarge):
            matching_count_bruteforce(np.zeros((13, 13), dtype=int))
