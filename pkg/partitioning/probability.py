import math
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor, as_completed
from fractions import Fraction

from django.conf import settings
from tqdm import tqdm

from chain.blocks import derive_seed, honest_block_hashes
from partitioning.exceptions import TargetSetError
from partitioning.selection import select_indexes, selection_word

OVERLAPPING, DISJOINT = "overlapping", "disjoint"
WINDOW_MODES = (OVERLAPPING, DISJOINT)
TRIALS_PER_CHUNK = 5_000
MonteCarloEstimate = namedtuple("MonteCarloEstimate", ["estimate", "standard_error", "successes", "trials"])


def ideal_probability_ratio(config):
    """L x prod((G - n + 1) / n) for n from G x (1 - TP) + 1 to G, as a Fraction

    Equals L / C(G, G x TP): a union bound over the organizer's L attempts."""

    G = config.group_count
    result = Fraction(1)
    for n in range(config.testing_count + 1, G + 1):
        result *= Fraction(G - n + 1, n)
    return config.block_limit * result


def exact_ideal_probability(config):
    return float(ideal_probability_ratio(config))


def complement_probability_ratio(config):
    """1 - (1 - 1 / C(G, G x TP)) ** L: chance that at least one of L
    independent attempts draws the target training set"""

    single_shot = Fraction(1, math.comb(config.group_count, config.training_count))
    return 1 - (1 - single_shot) ** config.block_limit


def complement_probability(config):
    return float(complement_probability_ratio(config))


def attempt_blocks(config, window):
    """Heights used as `at_block` by the organizer's L attempts"""

    count = config.training_count
    if window == OVERLAPPING:
        return [count + attempt for attempt in range(config.block_limit)]
    elif window == DISJOINT:
        return [count * (attempt + 1) for attempt in range(config.block_limit)]
    raise ValueError(f"Unknown window mode: {window!r} (expected one of {', '.join(WINDOW_MODES)})")


def run_trial(config, target, chain_seed, at_blocks):
    count = config.training_count
    last = max(at_blocks)
    hashes = honest_block_hashes(chain_seed, last + 1)
    # only blocks read by some attempt are hashed again for selection
    words = {number: selection_word(hashes[number]) for number in range(min(at_blocks) - count + 1, last + 1)}
    indexes = range(config.group_count)
    for at_block in at_blocks:
        attempt_words = [words[at_block - t] for t in range(count)]
        if set(select_indexes(indexes, attempt_words, count).training_indexes) == target:
            return True
    return False


def count_successes(config, target, seed, at_blocks, trial_numbers):
    return sum(
        run_trial(config, target, derive_seed(seed, config.group_count, trial), at_blocks) for trial in trial_numbers
    )


def trial_chunks(trials, chunk_size=TRIALS_PER_CHUNK):
    return [range(start, min(start + chunk_size, trials)) for start in range(0, trials, chunk_size)]


def monte_carlo_ideal_probability(
    config, target_training_set, trials, seed, window=OVERLAPPING, progress=False, workers=None
):
    """Estimate the chance that an organizer gets `target_training_set` when
    allowed to trigger the partitioning at any of L block heights

    Every trial runs on its own chain, seeded by the trial number, so the
    result does not depend on `workers`. Permutations of the target count as
    success since they yield the same training dataset."""

    target = frozenset(target_training_set)
    if len(target) != config.training_count or not target <= set(range(config.group_count)):
        raise TargetSetError(
            f"Target must have {config.training_count} distinct indexes in range(0, {config.group_count})"
        )
    if trials < 1:
        raise ValueError(f"At least one trial is needed (got {trials})")
    if workers is None:
        workers = settings.DANKU_MC_WORKERS
    if workers < 1:
        raise ValueError(f"At least one worker is needed (got {workers})")

    at_blocks = attempt_blocks(config, window)
    chunks = trial_chunks(trials)
    successes = 0
    with tqdm(total=trials, desc=f"G={config.group_count}", unit=" trials", disable=not progress) as progress_bar:
        if workers == 1:
            for chunk in chunks:
                successes += count_successes(config, target, seed, at_blocks, chunk)
                progress_bar.update(len(chunk))
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures = {
                    executor.submit(count_successes, config, target, seed, at_blocks, chunk): len(chunk)
                    for chunk in chunks
                }
                for future in as_completed(futures):
                    successes += future.result()
                    progress_bar.update(futures[future])

    estimate = successes / trials
    return MonteCarloEstimate(
        estimate=estimate,
        standard_error=math.sqrt(estimate * (1 - estimate) / trials),
        successes=successes,
        trials=trials,
    )
