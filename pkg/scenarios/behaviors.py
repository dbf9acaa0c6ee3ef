"""What every actor of a scenario does when the schedule calls it.

A behavior is looked up by (role, name) among the subclasses of `Behavior`;
each scheduled action `x` runs the behavior's `do_x` method. Actions that
hit the contract go through its transactions, so rejections end up in the
event log like any other call.
"""

import random
from pathlib import Path

from commitments.groups import DataGroup, Reveal, make_point
from commitments.hashing import commit_groups
from contract.danku import INIT1_DONE, DankuContract
from fixed_point.exceptions import ModelFileError, ShapeMismatchError
from fixed_point.modelfile import is_integer_tree, load_model_file
from fixed_point.network import check_shapes, make_weights_biases, random_weights_biases
from partitioning.exceptions import InsufficientHistoryError
from partitioning.selection import randomly_select_index
from utils.classes import find_subclass

ORGANIZER, SUBMITTER, MINER = "organizer", "submitter", "miner"
ROLES = (ORGANIZER, SUBMITTER, MINER)
SHARED_ACTIONS = ("evaluate_all", "finalize")
MODEL_SOURCES = ("model", "model_file", "random")


def behavior_class(role, name):
    return find_subclass(Behavior, key=lambda cls: cls.__name__, name=name, roles=role)


def is_integer(value):
    return isinstance(value, int) and not isinstance(value, bool)


class Behavior:
    name = None
    roles = ()
    actions = SHARED_ACTIONS
    param_names = ()

    def __init__(self, actor, params, base_dir=None):
        self.actor = actor
        self.params = params
        self.base_dir = base_dir

    @classmethod
    def params_errors(cls, params, contract, roles, base_dir):
        """List of (parameter, message) for invalid behavior parameters

        `contract` is the validated ContractConfig (None if it is invalid)
        and `roles` maps every actor name to its role."""

        unknown = sorted(set(params) - set(cls.param_names))
        if unknown:
            return [("", f"unknown parameters for {cls.name}: {', '.join(unknown)}")]
        return []

    def perform(self, action, context, args):
        return getattr(self, f"do_{action}")(context, args)

    def wants_to_mine(self, context):
        return False

    def mine(self, context):
        raise NotImplementedError()

    def do_evaluate_all(self, context, args):
        return context.contract.evaluate_all_models(self.actor)

    def do_finalize(self, context, args):
        return context.contract.finalize_contract(self.actor)


class HonestMiner(Behavior):
    name = "honest"
    roles = (MINER,)


class HonestOrganizer(Behavior):
    name = "honest"
    roles = (ORGANIZER,)
    actions = ("init1", "init2", "init3", "reveal_test", "cancel") + SHARED_ACTIONS
    param_names = ("deposit",)

    def __init__(self, actor, params, base_dir=None):
        super().__init__(actor, params, base_dir)
        self.committed = []

    @classmethod
    def params_errors(cls, params, contract, roles, base_dir):
        errors = super().params_errors(params, contract, roles, base_dir)
        if "deposit" in params and not is_integer(params["deposit"]):
            errors.append(("deposit", f"must be an integer (got {params['deposit']!r})"))
        return errors

    def reveals(self, indexes):
        return [
            Reveal(index=index, group=self.committed[index].group, nonce=self.committed[index].nonce)
            for index in indexes
        ]

    def test_reveals(self, context):
        return self.reveals(context.contract.get_testing_index())

    def do_init1(self, context, args):
        config = context.config.contract
        self.committed = commit_groups(context.points, config.group_size, context.rng)
        context.committed = self.committed
        deposit = self.params.get("deposit", config.reward)
        context.contract = DankuContract.init1(
            context.chain,
            self.actor,
            config,
            [committed.digest for committed in self.committed],
            deposit,
            schedule=context.config.gas_schedule,
            events=context.events,
        )
        return context.contract

    def do_init2(self, context, args):
        return context.contract.init2(self.actor)

    def do_init3(self, context, args):
        return context.contract.init3(self.actor, self.reveals(context.contract.get_training_index()))

    def do_reveal_test(self, context, args):
        return context.contract.reveal_test_data(self.actor, self.test_reveals(context))

    def do_cancel(self, context, args):
        return context.contract.cancel_contract(self.actor)


class WithholdTestReveal(HonestOrganizer):
    """Never reveals the testing data, hoping to keep the reward"""

    name = "withhold_test_reveal"

    def do_reveal_test(self, context, args):
        context.note(self.actor, "withholds the testing data")


class TamperReveal(HonestOrganizer):
    """Reveals testing data with one altered label"""

    name = "tamper_reveal"
    param_names = HonestOrganizer.param_names + ("group", "point")

    @classmethod
    def params_errors(cls, params, contract, roles, base_dir):
        errors = super().params_errors(params, contract, roles, base_dir)
        for name in ("group", "point"):
            if name in params and (not is_integer(params[name]) or params[name] < 0):
                errors.append((name, f"must be a non-negative integer (got {params[name]!r})"))
        return errors

    def test_reveals(self, context):
        reveals = super().test_reveals(context)
        position = self.params.get("group", 0) % len(reveals)
        reveal = reveals[position]
        points = list(reveal.group.points)
        index = self.params.get("point", 0) % len(points)
        labels = max(context.config.contract.model_shape.output_dim, 2)
        points[index] = make_point(points[index].inputs, (points[index].label + 1) % labels)
        reveals[position] = reveal._replace(group=DataGroup(points=tuple(points)))
        context.note(self.actor, f"alters label of point {index} in group {reveal.index}")
        return reveals


class BlockGrinding(HonestOrganizer):
    """Organizer who also mines: while init2 is pending, every block it mines
    is the first of `candidates` hashes that would give the `target`
    training set, and init2 is only called once the chain is on target (or
    at the deadline)"""

    name = "block_grinding"
    param_names = HonestOrganizer.param_names + ("target", "candidates")
    default_candidates = 64

    @classmethod
    def params_errors(cls, params, contract, roles, base_dir):
        errors = super().params_errors(params, contract, roles, base_dir)
        target = params.get("target")
        if (
            not isinstance(target, list)
            or not target
            or not all(is_integer(index) and index >= 0 for index in target)
            or len(set(target)) != len(target)
        ):
            errors.append(("target", f"must be a list of distinct group indexes (got {target!r})"))
        candidates = params.get("candidates", cls.default_candidates)
        if not is_integer(candidates) or candidates < 1:
            errors.append(("candidates", f"must be an integer >= 1 (got {candidates!r})"))
        return errors

    @property
    def target(self):
        return frozenset(self.params["target"])

    def wants_to_mine(self, context):
        return context.contract is not None and context.contract.phase == INIT1_DONE

    def mine(self, context):
        contract = context.contract
        candidates = self.params.get("candidates", self.default_candidates)
        try:
            contract.preview_training_set(context.chain.candidate_hash())
        except InsufficientHistoryError:
            return context.chain.mine_block()
        return context.chain.mine_block_adversarial(
            candidates, lambda block_hash: contract.preview_training_set(block_hash) == self.target
        )

    def current_training_set(self, context):
        contract = context.contract
        try:
            partition = randomly_select_index(
                range(len(contract.commitments)),
                context.chain,
                context.chain.height - 1,
                contract.config.training_fraction,
            )
        except InsufficientHistoryError:
            return None
        return frozenset(partition.training_indexes)

    def do_init2(self, context, args):
        contract = context.contract
        if contract.phase != INIT1_DONE:
            context.note(self.actor, "skips init2: the partition is already selected")
            return None
        on_target = self.current_training_set(context) == self.target
        if not on_target and context.chain.height < contract.deadlines["init2"]:
            context.note(self.actor, "delays init2: partition is not on target")
            return None
        partition = contract.init2(self.actor)
        if partition is not None:
            reached = frozenset(partition.training_indexes) == self.target
            context.analytics["grinding_target_reached"] = reached
            context.note(self.actor, "got the target training set" if reached else "missed the target training set")
        return partition


class HonestSubmitter(Behavior):
    name = "honest"
    roles = (SUBMITTER,)
    actions = ("submit", "evaluate") + SHARED_ACTIONS
    param_names = MODEL_SOURCES + ("payment_address",)

    @classmethod
    def params_errors(cls, params, contract, roles, base_dir):
        errors = super().params_errors(params, contract, roles, base_dir)
        if errors:
            return errors
        sources = [source for source in MODEL_SOURCES if source in params]
        if len(sources) != 1:
            return [("", f"must have exactly one of {', '.join(MODEL_SOURCES)}")]
        if contract is None:
            return errors

        source = sources[0]
        try:
            if source == "model":
                model = params["model"]
                if not isinstance(model, dict) or not is_integer_tree(model.get("weights", [])):
                    return [("model", "must have integer mantissa weights and biases")]
                if not is_integer_tree(model.get("biases", [])):
                    return [("model", "must have integer mantissa weights and biases")]
                check_shapes(contract.model_shape, make_weights_biases(model["weights"], model["biases"]))
            elif source == "model_file":
                model, _ = load_model_file(Path(base_dir or ".") / str(params["model_file"]), contract.scale_bits)
                if model != contract.model_shape:
                    errors.append(("model_file", f"layers {list(model.layer_sizes)} do not match the contract"))
            else:
                generator = params["random"]
                if not isinstance(generator, dict) or not is_integer(generator.get("seed")):
                    errors.append(("random.seed", "must be an integer"))
                elif not is_integer(generator.get("magnitude", 1)) or generator.get("magnitude", 1) < 1:
                    errors.append(("random.magnitude", "must be an integer >= 1"))
        except KeyError as exc:
            errors.append((source, f"missing {exc}"))
        except (ShapeMismatchError, ModelFileError, TypeError) as exc:
            errors.append((source, str(exc)))
        return errors

    @property
    def payment_address(self):
        return self.params.get("payment_address", self.actor)

    def build_params(self, context):
        config = context.config.contract
        if "model" in self.params:
            return make_weights_biases(self.params["model"]["weights"], self.params["model"]["biases"])
        elif "model_file" in self.params:
            return load_model_file(Path(self.base_dir or ".") / self.params["model_file"], config.scale_bits)[1]
        generator = self.params["random"]
        return random_weights_biases(
            config.model_shape,
            random.Random(generator["seed"]),
            config.scale_bits,
            generator.get("magnitude", 1),
        )

    def do_submit(self, context, args):
        params = self.build_params(context)
        if params is None:
            return None
        contract = context.contract
        return contract.submit_model(self.actor, self.payment_address, contract.config.model_shape, params)

    def do_evaluate(self, context, args):
        contract = context.contract
        if "submission" in args:
            submission_ids = [args["submission"]]
        else:
            submission_ids = [
                submission_id
                for submission_id in contract.get_submission_id(self.actor)
                if submission_id not in contract.scores
            ]
        if not submission_ids:
            context.note(self.actor, "has no submission to evaluate")
        return [contract.evaluate_model(self.actor, submission_id) for submission_id in submission_ids]


class DuplicateResubmit(HonestSubmitter):
    """Copies the parameters another submitter published and submits them
    as its own"""

    name = "duplicate_resubmit"
    param_names = ("copy_of", "payment_address")

    @classmethod
    def params_errors(cls, params, contract, roles, base_dir):
        errors = super(HonestSubmitter, cls).params_errors(params, contract, roles, base_dir)
        copy_of = params.get("copy_of")
        if roles.get(copy_of) != SUBMITTER:
            errors.append(("copy_of", f"must be the name of a submitter (got {copy_of!r})"))
        return errors

    def build_params(self, context):
        contract = context.contract
        submission_ids = contract.get_submission_id(self.params["copy_of"])
        if not submission_ids:
            context.note(self.actor, f"finds nothing to copy from {self.params['copy_of']}")
            return None
        return contract.submissions[submission_ids[0]].params
