from collections import namedtuple
from fractions import Fraction

from django.conf import settings
from eth_utils import keccak

from partitioning.exceptions import InsufficientHistoryError, PartitionConfigError

PartitionResult = namedtuple("PartitionResult", ["training_indexes", "testing_indexes"])


def parse_fraction(value):
    """
    >>> parse_fraction("4/5")
    Fraction(4, 5)
    >>> parse_fraction("0.8")
    Fraction(4, 5)
    >>> parse_fraction(80)
    Fraction(4, 5)
    """

    if isinstance(value, Fraction):
        return value
    elif isinstance(value, int) and value > 1:  # percentage, as in "the default ratio is 80"
        return Fraction(value, 100)
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise PartitionConfigError(f"Invalid fraction: {value!r}")


def training_count(group_count, training_fraction):
    count = group_count * parse_fraction(training_fraction)
    if count.denominator != 1 or not 0 < count < group_count:
        raise PartitionConfigError(
            f"{group_count} groups x {training_fraction} must be an integer between 0 and {group_count} (exclusive)"
        )
    return int(count)


class PartitionConfig(namedtuple("PartitionConfig", ["group_count", "training_fraction", "block_limit"])):
    __slots__ = ()

    @classmethod
    def create(cls, group_count, training_fraction=None, block_limit=None):
        if training_fraction is None:
            training_fraction = settings.DANKU_TRAINING_FRACTION
        if block_limit is None:
            block_limit = settings.DANKU_INIT2_BLOCK_LIMIT
        if group_count < 1 or block_limit < 1:
            raise PartitionConfigError("Group count and block limit must be positive")
        config = cls(
            group_count=group_count, training_fraction=parse_fraction(training_fraction), block_limit=block_limit,
        )
        training_count(group_count, config.training_fraction)
        return config

    @property
    def training_count(self):
        return training_count(self.group_count, self.training_fraction)

    @property
    def testing_count(self):
        return self.group_count - self.training_count


def digest_to_int(digest):
    """Unsigned big-endian interpretation of a digest (EVM's `uint(bytes32)`)"""

    return int.from_bytes(digest, "big")


def selection_word(block_hash):
    # The only place where the hash function of the selection loop is chosen
    return digest_to_int(keccak(block_hash))


def select_indexes(indexes, words, count):
    """Selection loop: `words[t]` seeds the choice of the t-th training index"""

    array = list(indexes)
    array_length = len(array)
    training = []
    for t in range(count):
        random_index = words[t] % array_length
        training.append(array[random_index])
        array[random_index] = array[array_length - 1]
        array_length -= 1

    testing = []
    while array_length > 0:
        testing.append(array[array_length - 1])
        array_length -= 1
    return PartitionResult(training_indexes=training, testing_indexes=testing)


def check_history(at_block, count, height):
    if at_block < count:
        raise InsufficientHistoryError(f"Block {at_block} is too early to select {count} training indexes")
    elif at_block >= height:
        raise InsufficientHistoryError(f"Block {at_block} is not mined yet (chain height is {height})")


def randomly_select_index(indexes, chain, at_block, training_fraction=None):
    """Split `indexes` in training/testing partitions seeded by block hashes

    The t-th training index is picked with the hash of block `at_block - t`."""

    indexes = list(indexes)
    if len(set(indexes)) != len(indexes):
        raise PartitionConfigError("Indexes must be distinct")
    if training_fraction is None:
        training_fraction = settings.DANKU_TRAINING_FRACTION
    count = training_count(len(indexes), training_fraction)
    check_history(at_block, count, chain.height)

    words = [selection_word(chain.blockhash(at_block - t)) for t in range(count)]
    return select_indexes(indexes, words, count)


def preview_training_set(indexes, chain, next_block_hash, training_fraction=None):
    """Training set that `randomly_select_index` would return if the next block
    had hash `next_block_hash` and the selection used it as `at_block`

    Used by a miner who is also the organizer to decide which candidate
    block to publish."""

    indexes = list(indexes)
    if training_fraction is None:
        training_fraction = settings.DANKU_TRAINING_FRACTION
    count = training_count(len(indexes), training_fraction)
    at_block = chain.height
    check_history(at_block, count, chain.height + 1)

    words = [selection_word(next_block_hash)]
    words.extend(selection_word(chain.blockhash(at_block - t)) for t in range(1, count))
    return frozenset(select_indexes(indexes, words, count).training_indexes)
