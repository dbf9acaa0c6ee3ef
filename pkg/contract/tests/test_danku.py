import random

import pytest
from django.test import SimpleTestCase

from chain.blocks import Chain
from chain.gas import GasSchedule
from commitments.groups import Reveal
from commitments.hashing import commit_groups
from contract.config import FIRST_PASSING, make_contract_config
from contract.danku import (
    CANCELLED_PHASE,
    FINALIZED,
    INIT1_DONE,
    INIT2_DONE,
    TEST_REVEALED,
    TRAINING_REVEALED,
    DankuContract,
)
from contract.events import ACCEPTED, CANCELLED, REJECTED, EventLog
from contract.exceptions import (
    AlreadyEvaluatedError,
    ChainHistoryError,
    DeadlineError,
    DepositMismatchError,
    EvaluationError,
    GasLimitExceededError,
    InvalidCommitmentsError,
    RevealMismatchError,
    SubmissionShapeError,
    UnauthorizedError,
    UnknownSubmissionError,
    WrongPhaseError,
)
from fixed_point.arithmetic import from_int
from fixed_point.network import ModelDefinition, make_weights_biases
from scenarios.datasets import synthetic_points

ORGANIZER, ALICE, BOB = "organizer", "alice", "bob"
S = 2 ** 20
MODEL = ModelDefinition.create([2, 2, 2])
GOOD = make_weights_biases([[[S, -S], [-S, S]], [[0, S], [S, 0]]], [[0, 0], [0, 0]])
INVERTED = make_weights_biases([[[S, -S], [-S, S]], [[S, 0], [0, S]]], [[0, 0], [0, 0]])
OVERFLOWING = make_weights_biases([[[0, 0], [0, 0]], [[2 ** 200, 0], [0, 0]]], [[2 ** 200, 2 ** 200], [0, 0]])


def make_config(**overrides):
    values = {
        "reward": 1000,
        "submission_period": 5,
        "evaluation_period": 5,
        "test_reveal_period": 3,
        "init2_block_limit": 5,
        "group_size": 5,
        "training_fraction": "4/5",
        "min_accuracy": "0.6",
        "model_shape": [2, 2, 2],
    }
    values.update(overrides)
    return make_contract_config(**values)


class DankuContractTestCase(SimpleTestCase):
    """The contract is created at block 20 with 20 hashed data groups

    With the default config: init2 deadline 25; init3 at 22 gives
    submissions until 27, test reveal until 30 and evaluation until 35."""

    gas_limit = None

    def setUp(self):
        self.chain = Chain(seed=1)
        self.chain.mine_blocks(20)
        self.committed = commit_groups(synthetic_points(100, seed=7), 5, random.Random(1))
        self.events = EventLog()
        schedule = GasSchedule.default(gas_limit=self.gas_limit) if self.gas_limit else None
        self.contract = DankuContract.init1(
            self.chain, ORGANIZER, self.make_config(), self.digests(), 1000, schedule=schedule, events=self.events,
        )

    def make_config(self):
        return make_config()

    def digests(self):
        return [item.digest for item in self.committed]

    def reveals(self, indexes):
        return [
            Reveal(index=index, group=self.committed[index].group, nonce=self.committed[index].nonce)
            for index in indexes
        ]

    def mine_to(self, height):
        self.chain.mine_blocks(height - self.chain.height)

    def reveal_training(self):
        self.mine_to(21)
        self.contract.init2(ORGANIZER)
        self.mine_to(22)
        self.contract.init3(ORGANIZER, self.reveals(self.contract.get_training_index()))

    def reveal_testing(self, height=28):
        self.mine_to(height)
        self.contract.reveal_test_data(ORGANIZER, self.reveals(self.contract.get_testing_index()))


class InitTests(DankuContractTestCase):
    def test_init1(self):
        assert self.contract.phase == INIT1_DONE
        assert self.contract.organizer == ORGANIZER
        assert self.contract.escrow_balance == 1000
        assert self.contract.deadlines == {"init2": 25}
        assert self.contract.phase_history == [(20, INIT1_DONE)]
        assert self.events.filter(operation="init1")[0].gas_used == 20 + 11

    def test_deposit_must_match_the_reward(self):
        events = EventLog()

        with pytest.raises(DepositMismatchError):
            DankuContract.init1(self.chain, ORGANIZER, make_config(), self.digests(), 999, events=events)
        assert [event.outcome for event in events] == [REJECTED]

    def test_invalid_commitments(self):
        with pytest.raises(InvalidCommitmentsError):
            DankuContract.init1(self.chain, ORGANIZER, make_config(), [], 1000)
        with pytest.raises(InvalidCommitmentsError):
            DankuContract.init1(self.chain, ORGANIZER, make_config(), [b"\x00" * 31] * 20, 1000)
        with pytest.raises(InvalidCommitmentsError):
            DankuContract.init1(self.chain, ORGANIZER, make_config(), self.digests()[:7], 1000)

    def test_init2_selects_the_partition(self):
        self.mine_to(21)
        partition = self.contract.init2(ORGANIZER)

        assert self.contract.phase == INIT2_DONE
        training, testing = self.contract.get_training_index(), self.contract.get_testing_index()
        assert (len(training), len(testing)) == (16, 4)
        assert sorted(training + testing) == list(range(20))
        assert training == partition.training_indexes
        assert self.events.filter(operation="init2")[0].gas_used == 84

    def test_preview_matches_init2(self):
        expected = self.contract.preview_training_set(self.chain.candidate_hash())
        self.mine_to(21)
        self.contract.init2(ORGANIZER)

        assert frozenset(self.contract.get_training_index()) == expected

    def test_indexes_are_unknown_before_init2(self):
        with pytest.raises(WrongPhaseError):
            self.contract.get_training_index()
        with pytest.raises(WrongPhaseError):
            self.contract.get_testing_index()

    def test_init2_only_by_the_organizer(self):
        self.mine_to(21)

        with pytest.raises(UnauthorizedError):
            self.contract.init2(ALICE)
        assert self.contract.phase == INIT1_DONE

    def test_init2_at_the_deadline(self):
        self.mine_to(25)
        self.contract.init2(ORGANIZER)

        assert self.contract.phase == INIT2_DONE

    def test_init2_after_the_deadline_cancels(self):
        self.mine_to(26)

        assert self.contract.init2(ORGANIZER) is None
        assert self.contract.phase == CANCELLED_PHASE
        assert self.contract.escrow_balance == 0
        assert [(payout.recipient, payout.amount, payout.height) for payout in self.contract.payouts] == [
            (ORGANIZER, 1000, 26)
        ]
        assert self.events.filter(operation="init2")[0].outcome == CANCELLED
        assert self.contract.funds_conserved()

    def test_init2_needs_enough_blocks(self):
        chain = Chain(seed=2)
        chain.mine_blocks(10)
        contract = DankuContract.init1(chain, ORGANIZER, make_config(), self.digests(), 1000)

        with pytest.raises(ChainHistoryError):
            contract.init2(ORGANIZER)
        assert contract.phase == INIT1_DONE

    def test_init3_reveals_training_data(self):
        self.reveal_training()

        assert self.contract.phase == TRAINING_REVEALED
        assert sorted(self.contract.revealed_training) == sorted(self.contract.get_training_index())
        assert self.contract.deadlines == {"init2": 25, "submission": 27, "test_reveal": 30, "evaluation": 35}
        assert self.events.filter(operation="init3")[0].gas_used == 512

    def test_init3_needs_every_training_group(self):
        self.mine_to(21)
        self.contract.init2(ORGANIZER)
        training = self.contract.get_training_index()

        with pytest.raises(RevealMismatchError):
            self.contract.init3(ORGANIZER, self.reveals(training[:-1]))
        with pytest.raises(RevealMismatchError):
            self.contract.init3(ORGANIZER, self.reveals(training + self.contract.get_testing_index()[:1]))
        assert self.contract.phase == INIT2_DONE
        assert self.contract.revealed_training == {}

    def test_init3_rejects_a_wrong_nonce(self):
        self.mine_to(21)
        self.contract.init2(ORGANIZER)
        reveals = self.reveals(self.contract.get_training_index())
        reveals[0] = reveals[0]._replace(nonce=reveals[0].nonce + 1)
        before = self.contract.snapshot()

        with pytest.raises(RevealMismatchError):
            self.contract.init3(ORGANIZER, reveals)
        assert self.contract.phase == INIT2_DONE
        assert self.contract.snapshot() == before

    def test_init3_only_by_the_organizer(self):
        self.mine_to(21)
        self.contract.init2(ORGANIZER)

        with pytest.raises(UnauthorizedError):
            self.contract.init3(ALICE, self.reveals(self.contract.get_training_index()))

    def test_init3_before_init2(self):
        with pytest.raises(WrongPhaseError):
            self.contract.init3(ORGANIZER, [])


class SubmissionTests(DankuContractTestCase):
    def test_submit_before_the_training_reveal(self):
        with pytest.raises(WrongPhaseError):
            self.contract.submit_model(ALICE, "alice-wallet", MODEL, GOOD)

    def test_submissions_get_sequential_ids(self):
        self.reveal_training()
        self.mine_to(23)

        assert self.contract.submit_model(ALICE, "alice-wallet", MODEL, GOOD) == 0
        assert self.contract.submit_model(BOB, "bob-wallet", MODEL, INVERTED) == 1
        assert self.contract.submit_model(ALICE, "alice-wallet", MODEL, INVERTED) == 2
        assert self.contract.get_submission_id(ALICE) == [0, 2]
        assert self.contract.get_submission_id("carol") == []
        assert self.events.filter(operation="submit_model")[0].gas_used == 14

    def test_submission_deadline(self):
        self.reveal_training()
        self.mine_to(27)
        self.contract.submit_model(ALICE, "alice-wallet", MODEL, GOOD)
        self.mine_to(28)

        with pytest.raises(DeadlineError):
            self.contract.submit_model(BOB, "bob-wallet", MODEL, GOOD)
        assert len(self.contract.submissions) == 1

    def test_model_must_match_the_shape(self):
        self.reveal_training()

        with pytest.raises(SubmissionShapeError):
            self.contract.submit_model(ALICE, "alice-wallet", ModelDefinition.create([2, 3, 2]), GOOD)
        with pytest.raises(SubmissionShapeError):
            self.contract.submit_model(ALICE, "alice-wallet", MODEL, make_weights_biases(GOOD.weights, [[0], [0]]))
        assert self.contract.submissions == []

    def test_get_prediction(self):
        self.reveal_training()
        self.contract.submit_model(ALICE, "alice-wallet", MODEL, GOOD)

        assert self.contract.get_prediction(0, [5, 1]) == 1
        assert self.contract.get_prediction(0, [1, 5]) == 0
        with pytest.raises(SubmissionShapeError):
            self.contract.get_prediction(0, [1, 2, 3])
        with pytest.raises(UnknownSubmissionError):
            self.contract.get_prediction(1, [1, 2])


class RevealTestDataTests(DankuContractTestCase):
    def setUp(self):
        super().setUp()
        self.reveal_training()

    def test_not_while_submissions_are_open(self):
        self.mine_to(27)

        with pytest.raises(DeadlineError):
            self.reveal_testing(27)
        assert self.contract.phase == TRAINING_REVEALED

    def test_window(self):
        self.reveal_testing(30)

        assert self.contract.phase == TEST_REVEALED
        assert sorted(self.contract.revealed_testing) == sorted(self.contract.get_testing_index())
        assert self.events.filter(operation="reveal_test_data")[0].gas_used == 128

    def test_too_late(self):
        with pytest.raises(DeadlineError):
            self.reveal_testing(31)

    def test_wrong_groups(self):
        self.mine_to(28)

        with pytest.raises(RevealMismatchError):
            self.contract.reveal_test_data(ORGANIZER, self.reveals(self.contract.get_training_index()[:4]))

    def test_only_by_the_organizer(self):
        self.mine_to(28)

        with pytest.raises(UnauthorizedError):
            self.contract.reveal_test_data(ALICE, self.reveals(self.contract.get_testing_index()))


class EvaluationTests(DankuContractTestCase):
    def setUp(self):
        super().setUp()
        self.reveal_training()
        self.mine_to(23)
        self.contract.submit_model(ALICE, "alice-wallet", MODEL, GOOD)
        self.contract.submit_model(BOB, "bob-wallet", MODEL, INVERTED)

    def test_honest_lifecycle(self):
        self.reveal_testing(28)
        self.mine_to(29)
        assert self.contract.evaluate_model(BOB, 1) == from_int(0)
        assert self.contract.evaluate_model(ALICE, 0) == from_int(1)
        self.mine_to(36)
        payout = self.contract.finalize_contract(BOB)

        assert (payout.recipient, payout.amount, payout.height) == ("alice-wallet", 1000, 36)
        assert self.contract.phase == FINALIZED
        assert [phase for height, phase in self.contract.phase_history] == [
            INIT1_DONE,
            INIT2_DONE,
            TRAINING_REVEALED,
            TEST_REVEALED,
            FINALIZED,
        ]
        assert self.contract.funds_conserved()
        assert all(event.outcome == ACCEPTED for event in self.events)
        assert self.events.gas_by_operation()["evaluate_model"] == 2 * 444

    def test_not_before_the_test_reveal_period_ends(self):
        self.mine_to(29)

        with pytest.raises(DeadlineError):
            self.contract.evaluate_model(ALICE, 0)
        assert self.contract.scores == {}

    def test_fallback_to_training_data(self):
        self.mine_to(31)
        self.contract.evaluate_model(ALICE, 0)
        self.mine_to(36)
        self.contract.finalize_contract(ALICE)

        assert TEST_REVEALED not in [phase for height, phase in self.contract.phase_history]
        assert self.contract.payouts[0].recipient == "alice-wallet"

    def test_evaluation_deadline(self):
        self.reveal_testing()
        self.mine_to(36)

        with pytest.raises(DeadlineError):
            self.contract.evaluate_model(ALICE, 0)

    def test_already_evaluated(self):
        self.reveal_testing()
        self.contract.evaluate_model(ALICE, 0)

        with pytest.raises(AlreadyEvaluatedError):
            self.contract.evaluate_model(BOB, 0)

    def test_unknown_submission(self):
        self.reveal_testing()

        with pytest.raises(UnknownSubmissionError):
            self.contract.evaluate_model(ALICE, 5)
        with pytest.raises(UnknownSubmissionError):
            self.contract.evaluate_model(ALICE, "0")

    def test_below_the_minimum_accuracy_is_never_best(self):
        self.reveal_testing()
        self.contract.evaluate_model(BOB, 1)
        self.mine_to(36)
        payout = self.contract.finalize_contract(BOB)

        assert self.contract.best is None
        assert (payout.recipient, payout.amount) == (ORGANIZER, 1000)

    def test_equal_scores_go_to_the_earlier_submission(self):
        self.contract.submit_model(BOB, "bob-wallet", MODEL, GOOD)
        self.reveal_testing()
        self.contract.evaluate_model(BOB, 2)
        assert self.contract.best.submission_id == 2

        self.contract.evaluate_model(ALICE, 0)
        assert self.contract.best.submission_id == 0

    def test_later_equal_score_does_not_displace(self):
        self.contract.submit_model(BOB, "bob-wallet", MODEL, GOOD)
        self.reveal_testing()
        self.contract.evaluate_model(ALICE, 0)
        self.contract.evaluate_model(BOB, 2)

        assert self.contract.best.submission_id == 0

    def test_evaluate_all(self):
        self.reveal_testing()
        self.contract.evaluate_model(ALICE, 0)
        scores = self.contract.evaluate_all_models(BOB)

        assert list(scores) == [1]
        assert sorted(self.contract.scores) == [0, 1]
        assert self.contract.best.submission_id == 0

    def test_overflow_is_rejected(self):
        self.contract.submit_model(BOB, "bob-wallet", MODEL, OVERFLOWING)
        self.reveal_testing()

        with pytest.raises(EvaluationError):
            self.contract.evaluate_model(BOB, 2)
        with pytest.raises(EvaluationError):
            self.contract.evaluate_all_models(BOB)
        assert self.contract.scores == {}


class FirstPassingTests(DankuContractTestCase):
    def make_config(self):
        return make_config(selection=FIRST_PASSING, min_accuracy="0")

    def test_earliest_passing_submission_wins(self):
        self.reveal_training()
        self.contract.submit_model(BOB, "bob-wallet", MODEL, INVERTED)
        self.contract.submit_model(ALICE, "alice-wallet", MODEL, GOOD)
        self.reveal_testing()
        self.contract.evaluate_model(ALICE, 1)
        assert self.contract.best.submission_id == 1

        self.contract.evaluate_model(BOB, 0)
        assert self.contract.best.submission_id == 0


class GasLimitTests(DankuContractTestCase):
    gas_limit = 1000

    def test_evaluate_all_over_the_gas_limit_changes_nothing(self):
        self.reveal_training()
        for index in range(5):
            self.contract.submit_model(f"submitter{index}", f"wallet{index}", MODEL, GOOD)
        self.reveal_testing()
        before = self.contract.snapshot()

        with pytest.raises(GasLimitExceededError):
            self.contract.evaluate_all_models(ORGANIZER)
        assert self.contract.snapshot() == before
        event = self.events.filter(operation="evaluate_all_models")[0]
        assert (event.outcome, event.gas_used) == (REJECTED, 1000)

        self.contract.evaluate_model(ORGANIZER, 0)
        assert self.contract.best.submission_id == 0


class FinalizeAndCancelTests(DankuContractTestCase):
    def test_finalize_too_early(self):
        self.reveal_training()
        self.mine_to(35)

        with pytest.raises(DeadlineError):
            self.contract.finalize_contract(ALICE)

    def test_finalize_only_once(self):
        self.reveal_training()
        self.mine_to(36)
        self.contract.finalize_contract(ALICE)

        with pytest.raises(WrongPhaseError):
            self.contract.finalize_contract(ALICE)
        assert len(self.contract.payouts) == 1
        assert self.contract.funds_conserved()

    def test_finalize_before_init3(self):
        with pytest.raises(WrongPhaseError):
            self.contract.finalize_contract(ORGANIZER)

    def test_cancel(self):
        payout = self.contract.cancel_contract(ORGANIZER)

        assert (payout.recipient, payout.amount) == (ORGANIZER, 1000)
        assert self.contract.phase == CANCELLED_PHASE
        with pytest.raises(WrongPhaseError):
            self.contract.init2(ORGANIZER)
        assert self.contract.funds_conserved()

    def test_cancel_after_init2(self):
        self.mine_to(21)
        self.contract.init2(ORGANIZER)
        self.contract.cancel_contract(ORGANIZER)

        assert self.contract.phase == CANCELLED_PHASE

    def test_cancel_only_by_the_organizer(self):
        with pytest.raises(UnauthorizedError):
            self.contract.cancel_contract(ALICE)
        assert self.contract.escrow_balance == 1000

    def test_no_cancel_once_training_data_is_revealed(self):
        self.reveal_training()

        with pytest.raises(WrongPhaseError):
            self.contract.cancel_contract(ORGANIZER)
        assert self.contract.escrow_balance == 1000
