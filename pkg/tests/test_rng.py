"""
Tests for the seeded random stream
"""

from collections import Counter

import pytest

from src.rng import Rng, label_hash, mix64


class TestRng:
    def test_deterministic(self):
        a, b = Rng(42), Rng(42)
        assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]

    def test_split_ignores_parent_consumption(self):
        parent = Rng(7)
        child = parent.split("spread")
        for _ in range(10):
            parent.next_u64()
        assert parent.split("spread").next_u64() == Rng(7).split("spread").next_u64()
        assert child.seed == Rng(7).split("spread").seed

    def test_labels_give_different_streams(self):
        rng = Rng(1)
        assert rng.split("a").next_u64() != rng.split("b").next_u64()

    def test_mix64_is_64_bit(self):
        assert 0 <= mix64(2**70 + 3) < 2**64
        assert 0 <= label_hash("subline") < 2**64

    def test_randbelow_range(self):
        rng = Rng(3)
        values = {rng.randbelow(5) for _ in range(500)}
        assert values == {0, 1, 2, 3, 4}

    def test_randbelow_rejects_empty_range(self):
        with pytest.raises(ValueError):
            Rng(1).randbelow(0)

    def test_sample_distinct(self):
        items = list(range(20))
        picked = Rng(9).sample(items, 6)
        assert len(set(picked)) == 6
        assert set(picked) <= set(items)
        with pytest.raises(ValueError):
            Rng(9).sample(items, 21)

    def test_choice_roughly_uniform(self):
        """1000 draws over 7 items stay within five standard deviations"""
        rng = Rng(11)
        counts = Counter(rng.choice("abcdefg") for _ in range(1000))
        # sd = sqrt(1000 * 1/7 * 6/7) ≈ 11.1
        assert all(abs(counts[c] - 1000 / 7) < 5 * 11.1 for c in "abcdefg")
