import numpy as np
import pytest

from orbit_bergman.ordering import (
    FreeWord,
    magnus_key,
    magnus_less,
    magnus_series,
)


def random_word(rng, max_len=6):
    letters = (1, -1, 2, -2)
    length = rng.integers(0, max_len + 1)
    return FreeWord(tuple(letters[i] for i in rng.integers(0, 4, length)))


class TestFreeWord:
    def test_free_reduction(self):
        assert FreeWord((1, -1, 2)).letters == (2,)
        assert FreeWord((1, 2, -2, -1)).letters == ()

    def test_inverse(self):
        w = FreeWord.from_str("A B A^-1")
        assert (w * w.inverse()).is_identity

    def test_str_round_trip(self):
        w = FreeWord.from_str("A A B^-1 A")
        assert FreeWord.from_str(str(w)) == w


class TestMagnusSeries:
    def test_generator_image(self):
        s = magnus_series(FreeWord((1,)), 4)
        assert s.coefficient(()) == 1
        assert s.coefficient((0,)) == 1
        assert s.coefficient((1,)) == 0

    def test_inverse_geometric(self):
        s = magnus_series(FreeWord((-1,)), 5)
        for j in range(6):
            assert s.coefficient((0,) * j) == (-1) ** j

    def test_constant_term_always_one(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            assert magnus_series(random_word(rng), 8).coefficient(()) == 1

    def test_product_of_inverses_cancels(self):
        s = magnus_series(FreeWord.from_str("A B").inverse() * FreeWord.from_str("A B"), 6)
        assert s.coeffs == {(): 1}


class TestMagnusLess:
    def test_identity_below_a(self):
        assert magnus_less(FreeWord(), FreeWord((1,)))

    def test_a_inverse_below_identity(self):
        assert magnus_less(FreeWord((-1,)), FreeWord())

    def test_irreflexive(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            w = random_word(rng)
            assert not magnus_less(w, w)

    def test_total(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            u, v = random_word(rng), random_word(rng)
            if u == v:
                continue
            assert magnus_less(u, v) != magnus_less(v, u)

    def test_transitive_sampled(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            a, b, c = sorted(
                (random_word(rng), random_word(rng), random_word(rng)),
                key=magnus_key(),
            )
            if a != b and b != c:
                assert magnus_less(a, b)
                assert magnus_less(b, c)
                assert magnus_less(a, c)

    def test_left_invariance(self):
        rng = np.random.default_rng(13)
        for _ in range(1000):
            u, v, w = random_word(rng, 4), random_word(rng, 4), random_word(rng, 4)
            if u == v:
                continue
            assert magnus_less(u, v) == magnus_less(w * u, w * v)

    def test_escalation_on_deep_tie(self):
        # words agreeing to high degree: commutator-heavy pairs
        u = FreeWord.from_str("A B A^-1 B^-1")
        v = FreeWord()
        assert magnus_less(v, u) != magnus_less(u, v)

    def test_sort_key(self):
        words = [FreeWord((1,)), FreeWord((-1,)), FreeWord(), FreeWord((2,))]
        got = sorted(words, key=magnus_key())
        assert got[0] == FreeWord((-1,))
        assert got[1] == FreeWord()
        # A vs B: first differing monomial is X (degree 1): coeff 1 vs 0,
        # so B < A in this order
        assert got[2] == FreeWord((2,))
        assert got[3] == FreeWord((1,))
