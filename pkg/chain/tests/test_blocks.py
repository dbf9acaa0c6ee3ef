import math

import pytest
from django.test import SimpleTestCase

from chain.blocks import GENESIS_PARENT_HASH, Chain, derive_seed, honest_block_hashes
from chain.exceptions import BlockOutOfRangeError


class ChainTests(SimpleTestCase):
    def test_empty_chain(self):
        chain = Chain(seed=1)

        assert chain.height == 0
        assert chain.parent_hash == GENESIS_PARENT_HASH
        assert chain.blocks == ()

    def test_mining_appends_numbered_blocks(self):
        chain = Chain(seed=1)

        blocks = chain.mine_blocks(3)
        assert [block.number for block in blocks] == [0, 1, 2]
        assert chain.height == len(chain) == 3
        assert chain.parent_hash == blocks[-1].hash
        assert len({block.hash for block in blocks}) == 3

    def test_same_seed_gives_same_hashes(self):
        first, second = Chain(seed=42), Chain(seed=42)
        first.mine_blocks(10)
        second.mine_blocks(10)

        assert first.blocks == second.blocks

    def test_different_seeds_give_different_hashes(self):
        first, second = Chain(seed=1), Chain(seed=2)
        first.mine_blocks(5)
        second.mine_blocks(5)

        assert [block.hash for block in first] != [block.hash for block in second]

    def test_invalid_seed(self):
        with pytest.raises(ValueError):
            Chain(seed=-1)
        with pytest.raises(ValueError):
            Chain(seed=2 ** 64)

    def test_blockhash(self):
        chain = Chain(seed=3)
        blocks = chain.mine_blocks(4)

        assert chain.blockhash(0) == blocks[0].hash
        assert chain.blockhash(3) == blocks[3].hash
        with pytest.raises(BlockOutOfRangeError):
            chain.blockhash(4)
        with pytest.raises(BlockOutOfRangeError):
            chain.blockhash(-1)


class AdversarialMiningTests(SimpleTestCase):
    def test_single_candidate_is_the_honest_block(self):
        honest, adversarial = Chain(seed=5), Chain(seed=5)
        honest.mine_blocks(3)
        adversarial.mine_blocks(3)

        honest.mine_block()
        adversarial.mine_block_adversarial(1, lambda block_hash: False)
        assert honest.blocks == adversarial.blocks

    def test_accepting_predicate_keeps_the_honest_block(self):
        honest, adversarial = Chain(seed=6), Chain(seed=6)

        assert honest.mine_block() == adversarial.mine_block_adversarial(64, lambda block_hash: True)

    def test_keeps_the_first_accepted_candidate(self):
        chain = Chain(seed=7)
        expected = chain.candidate_hash(2)

        block = chain.mine_block_adversarial(10, lambda block_hash: block_hash == expected)
        assert block.hash == expected
        assert chain.blockhash(0) == expected

    def test_keeps_the_last_candidate_when_nothing_is_accepted(self):
        chain = Chain(seed=8)
        expected = chain.candidate_hash(3)

        assert chain.mine_block_adversarial(4, lambda block_hash: False).hash == expected

    def test_at_least_one_candidate(self):
        with pytest.raises(ValueError):
            Chain(seed=9).mine_block_adversarial(0, lambda block_hash: True)

    def test_success_rate_matches_independent_candidates(self):
        trials, candidates = 2000, 8
        success = 26 / 256  # first byte divisible by 10
        expected = 1 - (1 - success) ** candidates

        hits = 0
        for trial in range(trials):
            chain = Chain(seed=derive_seed(trial))
            block = chain.mine_block_adversarial(candidates, lambda block_hash: block_hash[0] % 10 == 0)
            hits += block.hash[0] % 10 == 0

        sigma = math.sqrt(expected * (1 - expected) / trials)
        assert abs(hits / trials - expected) <= 4 * sigma

    def test_grinding_for_hashes_divisible_by_ten(self):
        trials, candidates = 10_000, 64
        expected = 1 - 0.9 ** candidates

        def divisible_by_ten(block_hash):
            return int.from_bytes(block_hash, "big") % 10 == 0

        hits = 0
        for trial in range(trials):
            block = Chain(seed=derive_seed(7, trial)).mine_block_adversarial(candidates, divisible_by_ten)
            hits += divisible_by_ten(block.hash)

        sigma = math.sqrt(expected * (1 - expected) / trials)
        assert abs(hits / trials - expected) <= 3 * sigma


def test_derive_seed_is_deterministic_and_64_bits():
    assert derive_seed(1, 2) == derive_seed(1, 2)
    assert derive_seed(1, 2) != derive_seed(2, 1)
    assert 0 <= derive_seed(2 ** 300, -5) < 2 ** 64


def test_honest_block_hashes_match_the_chain():
    chain = Chain(seed=12)
    chain.mine_blocks(6)

    assert honest_block_hashes(12, 6) == [block.hash for block in chain]
    assert honest_block_hashes(12, 0) == []
