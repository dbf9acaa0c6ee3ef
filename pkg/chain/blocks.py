from collections import namedtuple

from eth_utils import keccak

from chain.exceptions import BlockOutOfRangeError

Block = namedtuple("Block", ["number", "hash"])
GENESIS_PARENT_HASH = bytes(32)
SEED_BITS = 64


def word(value):
    return value.to_bytes(32, "big")


def derive_seed(*values):
    """Mix integers into a new 64-bit seed (used to decorrelate trial chains)"""

    digest = keccak(b"".join(word(value % 2 ** 256) for value in values))
    return int.from_bytes(digest[: SEED_BITS // 8], "big")


def honest_block_hashes(seed, count):
    """Hashes of blocks 0 to `count - 1` of `Chain(seed)` mined honestly, without
    keeping the blocks around"""

    seed_word = word(seed)
    parent_hash = GENESIS_PARENT_HASH
    hashes = []
    for number in range(count):
        parent_hash = keccak(seed_word + parent_hash + word(number))
        hashes.append(parent_hash)
    return hashes


class Chain:
    """Append-only simulated blockchain

    Block hashes are a pure function of (seed, parent hash, number) and, for
    adversarially mined blocks, of the index of the candidate the miner kept.
    Transactions are executed "inside" block `height`, the one being built.
    """

    def __init__(self, seed=0):
        if not 0 <= seed < 2 ** SEED_BITS:
            raise ValueError(f"Chain seed must be an unsigned 64-bit integer (got {seed})")
        self.seed = seed
        self._blocks = []
        self._seed_word = word(seed)

    def __len__(self):
        return len(self._blocks)

    def __iter__(self):
        return iter(self._blocks)

    @property
    def height(self):
        return len(self._blocks)

    @property
    def blocks(self):
        return tuple(self._blocks)

    @property
    def parent_hash(self):
        return self._blocks[-1].hash if self._blocks else GENESIS_PARENT_HASH

    def candidate_hash(self, candidate=0):
        """Hash of the next block if the miner keeps candidate number `candidate`

        Candidate 0 is the honest block."""

        preimage = self._seed_word + self.parent_hash + word(self.height)
        if candidate:
            preimage += word(candidate)
        return keccak(preimage)

    def _append(self, block_hash):
        block = Block(number=self.height, hash=block_hash)
        self._blocks.append(block)
        return block

    def mine_block(self):
        return self._append(self.candidate_hash())

    def mine_blocks(self, count):
        return [self.mine_block() for _ in range(count)]

    def mine_block_adversarial(self, candidates, choose):
        """Mine the first candidate hash accepted by `choose`, else the last one

        Models a miner that discards blocks whose hash is unfavorable to them."""

        if candidates < 1:
            raise ValueError(f"At least one candidate is needed (got {candidates})")
        for candidate in range(candidates):
            block_hash = self.candidate_hash(candidate)
            if choose(block_hash):
                break
        return self._append(block_hash)

    def blockhash(self, number):
        if not 0 <= number < self.height:
            raise BlockOutOfRangeError(f"Block {number} is not available (chain height is {self.height})")
        return self._blocks[number].hash
