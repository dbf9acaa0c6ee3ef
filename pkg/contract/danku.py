"""DanKu contract state machine.

The contract holds an escrowed reward, the organizer's hashed data groups
and the submitted models. Every state-changing call is a transaction: it
runs at the height of the block being built, is metered by a fresh
`GasMeter` and is logged to the `EventLog` whether it is accepted or not.
A rejected transaction raises a `ContractError` and leaves the state as it
was.
"""

from collections import namedtuple
from functools import wraps

from chain.exceptions import OutOfGasError
from chain.gas import GasMeter, GasSchedule
from commitments.exceptions import MalformedGroupError
from commitments.groups import flatten_groups
from commitments.hashing import WORD_SIZE, serialize_data_group, verify_reveal
from contract.config import BEST, ContractConfig
from contract.events import ACCEPTED, CANCELLED, REJECTED, EventLog
from contract.exceptions import (
    AlreadyEvaluatedError,
    ChainHistoryError,
    ContractError,
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
from fixed_point.exceptions import ArithmeticOverflowError, ShapeMismatchError
from fixed_point.network import accuracy, check_shapes, lift_inputs, predict
from partitioning.exceptions import InsufficientHistoryError, PartitionConfigError
from partitioning.selection import preview_training_set, randomly_select_index, training_count

INIT1_DONE = "Init1Done"
INIT2_DONE = "Init2Done"
TRAINING_REVEALED = "TrainingRevealed"
TEST_REVEALED = "TestRevealed"
FINALIZED = "Finalized"
CANCELLED_PHASE = "Cancelled"
TERMINAL_PHASES = (FINALIZED, CANCELLED_PHASE)
# Legal successors of every phase (TestRevealed may be skipped on fallback)
PHASE_TRANSITIONS = {
    None: (INIT1_DONE,),
    INIT1_DONE: (INIT2_DONE, CANCELLED_PHASE),
    INIT2_DONE: (TRAINING_REVEALED, CANCELLED_PHASE),
    TRAINING_REVEALED: (TEST_REVEALED, FINALIZED),
    TEST_REVEALED: (FINALIZED,),
    FINALIZED: (),
    CANCELLED_PHASE: (),
}
CONFIG_WORDS = len(ContractConfig._fields)
SCORE_WORDS = 3  # score, best submission id, best score

Submission = namedtuple(
    "Submission", ["submission_id", "submitter", "payment_address", "model", "params", "height"]
)
BestModel = namedtuple("BestModel", ["submission_id", "score"])
Payout = namedtuple("Payout", ["recipient", "amount", "height", "reason"])
ContractState = namedtuple(
    "ContractState",
    [
        "phase",
        "config",
        "organizer",
        "escrow_balance",
        "commitments",
        "partition",
        "revealed_training",
        "revealed_testing",
        "submissions",
        "scores",
        "best",
        "phase_deadlines",
        "payouts",
    ],
)


class Transaction:
    def __init__(self, caller, height, meter):
        self.caller = caller
        self.height = height
        self.meter = meter
        self.outcome = ACCEPTED
        self.detail = ""


def transaction(operation):
    """Run the decorated method as a metered, logged contract transaction

    The method receives a `Transaction` instead of the caller address."""

    def decorator(method):
        @wraps(method)
        def wrapper(self, caller, *args, **kwargs):
            tx = Transaction(caller=caller, height=self.chain.height, meter=GasMeter(self.schedule.gas_limit))
            try:
                result = method(self, tx, *args, **kwargs)
            except OutOfGasError as exc:
                self.events.append(tx.height, operation, caller, REJECTED, exc.limit, str(exc))
                raise GasLimitExceededError(str(exc)) from exc
            except ContractError as exc:
                self.events.append(tx.height, operation, caller, REJECTED, tx.meter.used, str(exc))
                raise
            self.events.append(tx.height, operation, caller, tx.outcome, tx.meter.used, tx.detail)
            return result

        return wrapper

    return decorator


class DankuContract:
    def __init__(self, chain, schedule=None, events=None):
        self.chain = chain
        self.schedule = schedule or GasSchedule.default()
        self.events = events if events is not None else EventLog()
        self.phase = None
        self.config = None
        self.organizer = None
        self.escrow_balance = 0
        self.commitments = ()
        self.partition = None
        self.revealed_training = {}
        self.revealed_testing = {}
        self.submissions = []
        self.scores = {}
        self.best = None
        self.deadlines = {}
        self.payouts = []
        self.phase_history = []

    @classmethod
    def init1(cls, chain, organizer, config, commitments, deposit, schedule=None, events=None):
        """Create a contract: commit the hashed data groups and escrow the reward

        If the transaction is rejected no contract is returned, but the
        rejection is still recorded in `events`."""

        contract = cls(chain, schedule=schedule, events=events)
        contract._init1(organizer, config, commitments, deposit)
        return contract

    # Helpers

    def _set_phase(self, phase, height):
        if phase not in PHASE_TRANSITIONS[self.phase]:
            raise WrongPhaseError(f"Cannot go from {self.phase} to {phase}")
        self.phase = phase
        self.phase_history.append((height, phase))

    def _require_phase(self, *phases):
        if self.phase not in phases:
            raise WrongPhaseError(f"Operation not allowed in phase {self.phase} (expected {', '.join(phases)})")

    def _require_organizer(self, tx):
        if tx.caller != self.organizer:
            raise UnauthorizedError(f"Only the organizer ({self.organizer}) can call this operation")

    def _pay(self, recipient, height, reason):
        payout = Payout(recipient=recipient, amount=self.escrow_balance, height=height, reason=reason)
        self.escrow_balance = 0
        self.payouts.append(payout)
        return payout

    def _check_reveals(self, tx, reveals, expected_indexes):
        reveals = list(reveals)
        indexes = [reveal.index for reveal in reveals]
        if sorted(indexes) != sorted(expected_indexes):
            raise RevealMismatchError(
                f"Expected groups {sorted(expected_indexes)} exactly once (got {sorted(indexes)})"
            )

        model = self.config.model_shape
        for reveal in reveals:
            try:
                words = len(serialize_data_group(reveal.group, reveal.nonce)) // WORD_SIZE
            except (MalformedGroupError, AttributeError, TypeError):
                raise RevealMismatchError(f"Group {reveal.index} is malformed")
            tx.meter.hash_words(words)
            if not verify_reveal(self.commitments[reveal.index], reveal.group, reveal.nonce):
                raise RevealMismatchError(f"Group {reveal.index} does not match its hashed data group")
            for point in reveal.group.points:
                if len(point.inputs) != model.input_dim or not 0 <= point.label < model.output_dim:
                    raise RevealMismatchError(f"Group {reveal.index} has points the model cannot be evaluated on")
            tx.meter.store_words(words)
        return {reveal.index: reveal for reveal in reveals}

    def _evaluation_dataset(self, height):
        if self.phase == TEST_REVEALED:
            revealed = self.revealed_testing
        elif self.phase == TRAINING_REVEALED:
            if height <= self.deadlines["test_reveal"]:
                raise DeadlineError(
                    f"Evaluation opens with the test reveal or after block {self.deadlines['test_reveal']}"
                )
            revealed = self.revealed_training  # fallback: testing data never revealed
        else:
            raise WrongPhaseError(f"Evaluation is not allowed in phase {self.phase}")
        if height > self.deadlines["evaluation"]:
            raise DeadlineError(f"Evaluation period ended at block {self.deadlines['evaluation']}")
        return flatten_groups(revealed[index].group for index in sorted(revealed))

    def _submission(self, submission_id):
        if not isinstance(submission_id, int) or not 0 <= submission_id < len(self.submissions):
            raise UnknownSubmissionError(f"There is no submission {submission_id!r}")
        return self.submissions[submission_id]

    def _score(self, tx, submission, dataset):
        try:
            return accuracy(submission.model, submission.params, dataset, self.config.scale_bits, tx.meter)
        except ArithmeticOverflowError as exc:
            raise EvaluationError(f"Submission {submission.submission_id} overflows: {exc}")

    def _is_new_best(self, submission_id, score):
        if score.mantissa < self.config.min_accuracy.mantissa:
            return False
        elif self.best is None:
            return True
        elif self.config.selection == BEST:
            # an equal score only wins for an earlier submission
            return score.mantissa > self.best.score.mantissa or (
                score.mantissa == self.best.score.mantissa and submission_id < self.best.submission_id
            )
        return submission_id < self.best.submission_id

    def _record_score(self, submission_id, score):
        # storage (SCORE_WORDS per score) is charged by the caller beforehand
        self.scores[submission_id] = score
        if self._is_new_best(submission_id, score):
            self.best = BestModel(submission_id=submission_id, score=score)
            return True
        return False

    # Transactions

    @transaction("init1")
    def _init1(self, tx, config, commitments, deposit):
        if self.phase is not None:
            raise WrongPhaseError("Contract already initialized")
        commitments = tuple(bytes(digest) for digest in commitments)
        if deposit != config.reward:
            raise DepositMismatchError(f"Deposit {deposit} is different from the reward {config.reward}")
        elif not commitments:
            raise InvalidCommitmentsError("At least one hashed data group is needed")
        elif any(len(digest) != WORD_SIZE for digest in commitments):
            raise InvalidCommitmentsError("Hashed data groups must be 32-byte digests")
        try:
            training_count(len(commitments), config.training_fraction)
        except PartitionConfigError as exc:
            raise InvalidCommitmentsError(str(exc))
        tx.meter.store_words(len(commitments) + CONFIG_WORDS)

        self.organizer = tx.caller
        self.config = config
        self.commitments = commitments
        self.escrow_balance = deposit
        self.deadlines = {"init2": tx.height + config.init2_block_limit}
        self._set_phase(INIT1_DONE, tx.height)
        tx.detail = f"{len(commitments)} hashed data groups, reward {deposit}"

    @transaction("init2")
    def init2(self, tx):
        self._require_phase(INIT1_DONE)
        self._require_organizer(tx)
        if tx.height > self.deadlines["init2"]:
            self._set_phase(CANCELLED_PHASE, tx.height)
            self._pay(self.organizer, tx.height, "init2 deadline missed")
            tx.outcome = CANCELLED
            tx.detail = f"init2 deadline was block {self.deadlines['init2']}"
            return None

        group_count = len(self.commitments)
        try:
            partition = randomly_select_index(
                range(group_count), self.chain, tx.height - 1, self.config.training_fraction
            )
        except InsufficientHistoryError as exc:
            raise ChainHistoryError(str(exc))
        count = len(partition.training_indexes)
        tx.meter.hash_words(count)
        tx.meter.compute(count * 3)  # modulo, swap and decrement per selected index
        tx.meter.store_words(group_count)

        self.partition = partition
        self._set_phase(INIT2_DONE, tx.height)
        tx.detail = f"training {sorted(partition.training_indexes)}"
        return partition

    @transaction("init3")
    def init3(self, tx, reveals):
        self._require_phase(INIT2_DONE)
        self._require_organizer(tx)
        revealed = self._check_reveals(tx, reveals, self.partition.training_indexes)

        self.revealed_training = revealed
        submission_deadline = tx.height + self.config.submission_period
        test_reveal_deadline = submission_deadline + self.config.test_reveal_period
        self.deadlines.update(
            {
                "submission": submission_deadline,
                "test_reveal": test_reveal_deadline,
                "evaluation": test_reveal_deadline + self.config.evaluation_period,
            }
        )
        self._set_phase(TRAINING_REVEALED, tx.height)
        tx.detail = f"{len(revealed)} training groups revealed"

    @transaction("submit_model")
    def submit_model(self, tx, payment_address, model, params):
        self._require_phase(TRAINING_REVEALED)
        if tx.height > self.deadlines["submission"]:
            raise DeadlineError(f"Submission period ended at block {self.deadlines['submission']}")
        if model != self.config.model_shape:
            raise SubmissionShapeError(
                f"Model has layers {list(model.layer_sizes)}, expected {list(self.config.model_shape.layer_sizes)}"
            )
        try:
            check_shapes(model, params)
        except ShapeMismatchError as exc:
            raise SubmissionShapeError(str(exc))
        tx.meter.store_words(model.parameter_count + 2)

        submission = Submission(
            submission_id=len(self.submissions),
            submitter=tx.caller,
            payment_address=payment_address,
            model=model,
            params=params,
            height=tx.height,
        )
        self.submissions.append(submission)
        tx.detail = f"submission {submission.submission_id}"
        return submission.submission_id

    @transaction("reveal_test_data")
    def reveal_test_data(self, tx, reveals):
        self._require_phase(TRAINING_REVEALED)
        self._require_organizer(tx)
        if tx.height <= self.deadlines["submission"]:
            raise DeadlineError(f"Submission period is open until block {self.deadlines['submission']}")
        elif tx.height > self.deadlines["test_reveal"]:
            raise DeadlineError(f"Test reveal period ended at block {self.deadlines['test_reveal']}")
        revealed = self._check_reveals(tx, reveals, self.partition.testing_indexes)

        self.revealed_testing = revealed
        self._set_phase(TEST_REVEALED, tx.height)
        tx.detail = f"{len(revealed)} testing groups revealed"

    @transaction("evaluate_model")
    def evaluate_model(self, tx, submission_id):
        dataset = self._evaluation_dataset(tx.height)
        submission = self._submission(submission_id)
        if submission_id in self.scores:
            raise AlreadyEvaluatedError(f"Submission {submission_id} was already evaluated")
        score = self._score(tx, submission, dataset)
        tx.meter.store_words(SCORE_WORDS)

        is_best = self._record_score(submission_id, score)
        tx.detail = f"submission {submission_id} score {score.mantissa}/{score.denominator}"
        if is_best:
            tx.detail += " (best)"
        return score

    @transaction("evaluate_all_models")
    def evaluate_all_models(self, tx):
        """Evaluate every submission not evaluated yet in a single transaction

        Nothing is recorded unless all of them fit under the gas limit."""

        dataset = self._evaluation_dataset(tx.height)
        pending = [submission for submission in self.submissions if submission.submission_id not in self.scores]
        scores = [(submission.submission_id, self._score(tx, submission, dataset)) for submission in pending]
        tx.meter.store_words(SCORE_WORDS * len(scores))
        for submission_id, score in scores:
            self._record_score(submission_id, score)
        tx.detail = f"{len(scores)} submissions evaluated"
        return dict(scores)

    @transaction("finalize_contract")
    def finalize_contract(self, tx):
        self._require_phase(TRAINING_REVEALED, TEST_REVEALED)
        if tx.height <= self.deadlines["evaluation"]:
            raise DeadlineError(f"Evaluation period is open until block {self.deadlines['evaluation']}")

        tx.meter.store_words(2)
        if self.best is not None:
            submission = self.submissions[self.best.submission_id]
            payout = self._pay(submission.payment_address, tx.height, f"submission {submission.submission_id}")
        else:
            payout = self._pay(self.organizer, tx.height, "no model met the evaluation criteria")
        self._set_phase(FINALIZED, tx.height)
        tx.detail = f"paid {payout.amount} to {payout.recipient}"
        return payout

    @transaction("cancel_contract")
    def cancel_contract(self, tx):
        self._require_organizer(tx)
        self._require_phase(INIT1_DONE, INIT2_DONE)
        tx.meter.store_words(2)
        payout = self._pay(self.organizer, tx.height, "cancelled by the organizer")
        self._set_phase(CANCELLED_PHASE, tx.height)
        tx.detail = f"refunded {payout.amount}"
        return payout

    # Read-only queries

    def get_training_index(self):
        if self.partition is None:
            raise WrongPhaseError("Training indexes are only known after init2")
        return list(self.partition.training_indexes)

    def get_testing_index(self):
        if self.partition is None:
            raise WrongPhaseError("Testing indexes are only known after init2")
        return list(self.partition.testing_indexes)

    def get_submission_id(self, submitter):
        return [submission.submission_id for submission in self.submissions if submission.submitter == submitter]

    def get_prediction(self, submission_id, inputs):
        submission = self._submission(submission_id)
        try:
            return predict(submission.model, submission.params, lift_inputs(inputs, self.config.scale_bits))
        except ShapeMismatchError as exc:
            raise SubmissionShapeError(str(exc))

    def preview_training_set(self, next_block_hash):
        """Training indexes init2 would select if it ran in a block with hash
        `next_block_hash`"""

        return preview_training_set(
            range(len(self.commitments)), self.chain, next_block_hash, self.config.training_fraction
        )

    @property
    def total_paid(self):
        return sum(payout.amount for payout in self.payouts)

    def funds_conserved(self):
        if self.config is None:
            return not self.payouts
        terminal = self.phase in TERMINAL_PHASES
        return (
            self.escrow_balance + self.total_paid == self.config.reward
            and self.total_paid in (0, self.config.reward)
            and len(self.payouts) == (1 if terminal else 0)
        )

    def snapshot(self):
        return ContractState(
            phase=self.phase,
            config=self.config,
            organizer=self.organizer,
            escrow_balance=self.escrow_balance,
            commitments=self.commitments,
            partition=self.partition,
            revealed_training=dict(self.revealed_training),
            revealed_testing=dict(self.revealed_testing),
            submissions=tuple(self.submissions),
            scores=dict(self.scores),
            best=self.best,
            phase_deadlines=dict(self.deadlines),
            payouts=tuple(self.payouts),
        )
