"""Canonical serialization and keccak-256 commitments of data groups.

Payload layout (see docs/commitment-format.md): for every point, in order,
each input and then the label as a 32-byte big-endian two's complement word,
followed by the nonce as a 32-byte big-endian unsigned word.
"""

from eth_utils import keccak

from commitments.exceptions import MalformedGroupError
from commitments.groups import CommittedGroup, input_dimension, split_into_groups

WORD_SIZE = 32
NONCE_BITS = 256


def signed_word(value):
    if not isinstance(value, int) or isinstance(value, bool):
        raise MalformedGroupError(f"Scalar must be an integer (got {value!r})")
    try:
        return value.to_bytes(WORD_SIZE, "big", signed=True)
    except OverflowError:
        raise MalformedGroupError(f"Scalar {value} does not fit a signed 256-bit word")


def unsigned_word(value):
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < 2 ** NONCE_BITS:
        raise MalformedGroupError(f"Nonce must be an unsigned 256-bit integer (got {value!r})")
    return value.to_bytes(WORD_SIZE, "big")


def serialize_data_group(group, nonce):
    if not group.points:
        raise MalformedGroupError("Data group has no points")
    input_dimension(group)

    words = []
    for point in group.points:
        words.extend(signed_word(value) for value in point.inputs)
        words.append(signed_word(point.label))
    words.append(unsigned_word(nonce))
    return b"".join(words)


def hash_data_group(group, nonce):
    return keccak(serialize_data_group(group, nonce))


def verify_reveal(commitment, group, nonce):
    try:
        return hash_data_group(group, nonce) == bytes(commitment)
    except (MalformedGroupError, AttributeError, TypeError):
        return False


def new_nonce(rng, used):
    nonce = rng.getrandbits(NONCE_BITS)
    while nonce in used:
        nonce = rng.getrandbits(NONCE_BITS)
    used.add(nonce)
    return nonce


def commit_groups(points, group_size, rng):
    """Split `points` into groups and commit each one with a fresh nonce

    `rng` is a `random.Random`-like object; nonces are never reused inside
    the returned list."""

    used = set()
    committed = []
    for group in split_into_groups(points, group_size):
        nonce = new_nonce(rng, used)
        committed.append(CommittedGroup(group=group, nonce=nonce, digest=hash_data_group(group, nonce)))
    return committed


def rainbow_table_attack(commitments, candidate_groups, nonces=(0,)):
    """Precompute digests of `candidate_groups` x `nonces` and match them

    Returns a dict mapping the index of every recovered commitment to the
    candidate group it matched."""

    table = {}
    for group in candidate_groups:
        for nonce in nonces:
            try:
                table[hash_data_group(group, nonce)] = group
            except MalformedGroupError:
                break
    return {index: table[digest] for index, digest in enumerate(commitments) if digest in table}
