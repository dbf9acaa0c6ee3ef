import random
from collections import defaultdict, namedtuple

from tqdm import tqdm

from chain.blocks import Chain, derive_seed
from contract.events import EventLog
from contract.exceptions import ContractError
from fixed_point.arithmetic import to_float
from scenarios.analytics import run_analytics
from scenarios.behaviors import behavior_class
from scenarios.exceptions import InvariantViolationError

NONCE_STREAM = 1  # nonces are drawn from their own stream of the scenario seed

Note = namedtuple("Note", ["height", "actor", "message"])
SubmissionResult = namedtuple(
    "SubmissionResult", ["submission_id", "submitter", "payment_address", "score", "score_mantissa", "best"]
)
RunReport = namedtuple(
    "RunReport",
    [
        "scenario",
        "seed",
        "final_height",
        "phase",
        "phase_history",
        "payouts",
        "submissions",
        "events",
        "gas_by_operation",
        "notes",
        "analytics",
    ],
)


class ScenarioContext:
    """Everything the actors of a running scenario share"""

    def __init__(self, config):
        self.config = config
        self.chain = Chain(config.seed)
        self.events = EventLog()
        self.contract = None
        self.committed = []
        self.points = list(config.points)
        self.rng = random.Random(derive_seed(config.seed, NONCE_STREAM))
        self.notes = []
        self.analytics = {}
        self.behaviors = {
            spec.name: behavior_class(spec.role, spec.behavior)(spec.name, spec.params, config.base_dir)
            for spec in config.actors
        }

    def note(self, actor, message):
        self.notes.append(Note(height=self.chain.height, actor=actor, message=message))


def execute_step(context, step):
    behavior = context.behaviors[step.actor]
    if step.action == "init1" and context.contract is not None:
        context.note(step.actor, "cannot init1: the contract already exists")
        return
    elif step.action != "init1" and context.contract is None:
        context.note(step.actor, f"cannot {step.action}: there is no contract")
        return

    try:
        behavior.perform(step.action, context, step.args)
    except ContractError as exc:
        context.note(step.actor, f"{step.action} rejected: {exc}")


def check_invariants(context):
    contract = context.contract
    if contract is not None and not contract.funds_conserved():
        raise InvariantViolationError(
            f"Funds not conserved at block {context.chain.height}: escrow {contract.escrow_balance}, "
            f"paid {contract.total_paid}, reward {contract.config.reward}"
        )


def mine_next_block(context):
    for spec in context.config.actors:
        behavior = context.behaviors[spec.name]
        if behavior.wants_to_mine(context):
            return behavior.mine(context)
    return context.chain.mine_block()


def submission_results(contract):
    results = []
    for submission in contract.submissions:
        score = contract.scores.get(submission.submission_id)
        results.append(
            SubmissionResult(
                submission_id=submission.submission_id,
                submitter=submission.submitter,
                payment_address=submission.payment_address,
                score="-" if score is None else f"{to_float(score):.6f}",
                score_mantissa=None if score is None else score.mantissa,
                best=contract.best is not None and contract.best.submission_id == submission.submission_id,
            )
        )
    return results


def build_report(context):
    contract = context.contract
    return RunReport(
        scenario=context.config.name,
        seed=context.config.seed,
        final_height=context.chain.height,
        phase=contract.phase if contract is not None else None,
        phase_history=list(contract.phase_history) if contract is not None else [],
        payouts=list(contract.payouts) if contract is not None else [],
        submissions=submission_results(contract) if contract is not None else [],
        events=context.events.to_records(),
        gas_by_operation=sorted(context.events.gas_by_operation().items()),
        notes=list(context.notes),
        analytics=run_analytics(context),
    )


def run_scenario(config, progress=False):
    """Execute the schedule of `config` block by block on a fresh chain

    Scheduled actions run inside the block being built (in file order) and
    the block is mined afterwards. Fund conservation is checked after every
    block."""

    context = ScenarioContext(config)
    context.chain.mine_blocks(config.genesis_blocks)
    steps_by_height = defaultdict(list)
    for step in config.steps:
        steps_by_height[step.height].append(step)

    last_height = max(steps_by_height)
    heights = range(config.genesis_blocks, last_height + 1)
    for height in tqdm(heights, desc=config.name, unit=" blocks", disable=not progress):
        for step in steps_by_height[height]:
            execute_step(context, step)
        check_invariants(context)
        mine_next_block(context)
    return build_report(context)
