"""Scenario files.

A scenario is a JSON document describing a contract, the dataset its
organizer commits, the actors taking part and the schedule of their
actions, block by block:

    {
      "version": 1,
      "seed": 42,
      "genesis_blocks": 20,
      "gas_schedule": {"gas_limit": 8000000},
      "contract": {"reward": 1000, "submission_period": 5, ...},
      "dataset": {"synthetic": {"points": 100, "seed": 7}},
      "actors": [{"name": "alice", "role": "organizer", "behavior": "honest", "params": {}}],
      "schedule": [{"height": 20, "actor": "alice", "action": "init1"}]
    }

The dataset is one of `points` (inline list of {"inputs": [...], "label": n}),
`path` (CSV file relative to the scenario file) or `synthetic`.
"""

import decimal
import json
from collections import namedtuple
from pathlib import Path

from django.conf import settings

from chain.exceptions import GasScheduleError
from chain.gas import GasSchedule
from commitments.exceptions import DatasetFileError, MalformedGroupError
from commitments.groups import load_points, make_point
from contract.config import ContractConfig, contract_config_errors, make_contract_config
from contract.exceptions import InvalidConfigError
from partitioning.exceptions import PartitionConfigError
from partitioning.selection import training_count
from scenarios.behaviors import ROLES, behavior_class
from scenarios.datasets import synthetic_points
from scenarios.exceptions import ScenarioValidationErrors, UnknownScenarioError

SCHEMA_VERSION = 1
DEFAULT_GENESIS_BLOCKS = 20
MAX_SEED = 2 ** 64
SECTIONS = ("version", "seed", "genesis_blocks", "gas_schedule", "contract", "dataset", "actors", "schedule")
DATASET_SOURCES = ("points", "path", "synthetic")

ScenarioConfig = namedtuple(
    "ScenarioConfig",
    ["name", "version", "seed", "genesis_blocks", "gas_schedule", "contract", "points", "actors", "steps", "base_dir"],
)
ActorSpec = namedtuple("ActorSpec", ["name", "role", "behavior", "params"])
Step = namedtuple("Step", ["height", "actor", "action", "args"])


def is_integer(value):
    return isinstance(value, int) and not isinstance(value, bool)


def bundled_scenarios():
    return sorted(path.stem for path in Path(settings.BUNDLED_SCENARIOS_DIR).glob("*.json"))


def resolve_scenario(name_or_path):
    """Path of a scenario file, given its path or the name of a bundled scenario"""

    path = Path(name_or_path)
    if path.is_file():
        return path
    bundled = Path(settings.BUNDLED_SCENARIOS_DIR) / f"{name_or_path}.json"
    if bundled.is_file():
        return bundled
    raise UnknownScenarioError(
        f"{name_or_path} is not a file nor a bundled scenario ({', '.join(bundled_scenarios())})"
    )


def load_scenario(name_or_path, seed=None):
    path = resolve_scenario(name_or_path)
    try:
        data = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        errors = ScenarioValidationErrors()
        errors.new_error("", f"Cannot read scenario {path}: {exc}")
        raise errors
    return scenario_from_dict(data, name=path.stem, base_dir=path.parent, seed=seed)


def clean_seed(value, errors):
    if not is_integer(value) or not 0 <= value < MAX_SEED:
        errors.new_error("seed", f"must be an unsigned 64-bit integer (got {value!r})")
        return None
    return value


def clean_gas_schedule(value, errors):
    if not isinstance(value, dict):
        errors.new_error("gas_schedule", "must be an object")
        return None
    unknown = sorted(set(value) - set(GasSchedule._fields))
    if unknown:
        errors.new_error("gas_schedule", f"unknown fields: {', '.join(unknown)}")
        return None
    try:
        return GasSchedule.default(**value)
    except (GasScheduleError, TypeError, ValueError, decimal.InvalidOperation) as exc:
        errors.new_error("gas_schedule", str(exc))


def clean_contract(value, errors):
    if not isinstance(value, dict):
        errors.new_error("contract", "must be an object")
        return None
    unknown = sorted(set(value) - set(ContractConfig._fields))
    if unknown:
        errors.new_error("contract", f"unknown fields: {', '.join(unknown)}")
        return None
    field_errors = contract_config_errors(value)
    for field, message in field_errors:
        errors.new_error(f"contract.{field}", message)
    if field_errors:
        return None
    try:
        return make_contract_config(**value)
    except InvalidConfigError as exc:
        for field, message in exc.errors:
            errors.new_error(f"contract.{field}", message)


def clean_inline_points(value, errors):
    if not isinstance(value, list) or not value:
        errors.new_error("dataset.points", "must be a non-empty list")
        return None
    points = []
    for index, point in enumerate(value):
        path = f"dataset.points[{index}]"
        if not isinstance(point, dict):
            errors.new_error(path, "must be an object with inputs and label")
            continue
        inputs, label = point.get("inputs"), point.get("label")
        if not isinstance(inputs, list) or not inputs or not all(is_integer(item) for item in inputs):
            errors.new_error(f"{path}.inputs", "must be a non-empty list of integers")
        elif not is_integer(label):
            errors.new_error(f"{path}.label", f"must be an integer (got {label!r})")
        else:
            points.append(make_point(inputs, label))
    return points


def clean_synthetic(value, errors):
    if not isinstance(value, dict):
        errors.new_error("dataset.synthetic", "must be an object")
        return None
    count, seed = value.get("points"), value.get("seed", 0)
    low, high = value.get("low", -50), value.get("high", 50)
    found = len(errors.error_messages)
    if not is_integer(count) or count < 1:
        errors.new_error("dataset.synthetic.points", f"must be an integer >= 1 (got {count!r})")
    if not is_integer(seed):
        errors.new_error("dataset.synthetic.seed", f"must be an integer (got {seed!r})")
    if not is_integer(low) or not is_integer(high) or high <= low:
        errors.new_error("dataset.synthetic", "low and high must be integers with low < high")
    if len(errors.error_messages) > found:
        return None
    return synthetic_points(count, seed, low, high)


def clean_dataset(value, errors, base_dir):
    if not isinstance(value, dict):
        errors.new_error("dataset", "must be an object")
        return None
    sources = [source for source in DATASET_SOURCES if source in value]
    if len(sources) != 1:
        errors.new_error("dataset", f"must have exactly one of {', '.join(DATASET_SOURCES)}")
        return None

    source = sources[0]
    if source == "points":
        return clean_inline_points(value["points"], errors)
    elif source == "synthetic":
        return clean_synthetic(value["synthetic"], errors)
    filename = Path(base_dir or ".") / str(value["path"])
    try:
        return load_points(filename)
    except (OSError, DatasetFileError, MalformedGroupError) as exc:
        errors.new_error("dataset.path", f"cannot load {filename}: {exc}")


def check_dataset_fits(points, contract, errors):
    if len(points) % contract.group_size:
        errors.new_error("dataset", f"{len(points)} points cannot be split in groups of {contract.group_size}")
        return
    try:
        training_count(len(points) // contract.group_size, contract.training_fraction)
    except PartitionConfigError as exc:
        errors.new_error("contract.training_fraction", str(exc))
    model = contract.model_shape
    for index, point in enumerate(points):
        if len(point.inputs) != model.input_dim:
            errors.new_error(f"dataset.points[{index}]", f"must have {model.input_dim} inputs")
        elif not 0 <= point.label < model.output_dim:
            errors.new_error(f"dataset.points[{index}]", f"label must be in [0, {model.output_dim})")


def clean_actors(value, errors, contract, base_dir):
    if not isinstance(value, list) or not value:
        errors.new_error("actors", "must be a non-empty list")
        return []
    roles = {}
    for index, actor in enumerate(value):
        if isinstance(actor, dict) and isinstance(actor.get("name"), str):
            roles.setdefault(actor["name"], actor.get("role"))

    actors, names = [], set()
    for index, actor in enumerate(value):
        path = f"actors[{index}]"
        if not isinstance(actor, dict):
            errors.new_error(path, "must be an object")
            continue
        name, role = actor.get("name"), actor.get("role")
        behavior, params = actor.get("behavior", "honest"), actor.get("params", {})
        if not isinstance(name, str) or not name:
            errors.new_error(f"{path}.name", "must be a non-empty string")
            continue
        elif name in names:
            errors.new_error(f"{path}.name", f"duplicated actor name {name!r}")
            continue
        names.add(name)
        if role not in ROLES:
            errors.new_error(f"{path}.role", f"must be one of {', '.join(ROLES)} (got {role!r})")
            continue
        cls = behavior_class(role, behavior)
        if cls is None:
            errors.new_error(f"{path}.behavior", f"unknown behavior {behavior!r} for role {role}")
            continue
        if not isinstance(params, dict):
            errors.new_error(f"{path}.params", "must be an object")
            continue
        for field, message in cls.params_errors(params, contract, roles, base_dir):
            errors.new_error(f"{path}.params.{field}" if field else f"{path}.params", message)
        actors.append(ActorSpec(name=name, role=role, behavior=behavior, params=params))

    organizers = [name for name, role in roles.items() if role == "organizer"]
    if len(organizers) != 1:
        errors.new_error("actors", f"must have exactly one organizer (got {len(organizers)})")
    return actors


def init2_history(points, contract):
    """Training indexes init2 selects, hence the blocks of history it needs"""

    if not points or contract is None or len(points) % contract.group_size:
        return None
    try:
        return training_count(len(points) // contract.group_size, contract.training_fraction)
    except PartitionConfigError:
        return None


def clean_schedule(value, errors, actors, genesis_blocks, history=None):
    if not isinstance(value, list) or not value:
        errors.new_error("schedule", "must be a non-empty list")
        return []
    by_name = {actor.name: actor for actor in actors}
    steps, last_height = [], None
    for index, step in enumerate(value):
        path = f"schedule[{index}]"
        if not isinstance(step, dict):
            errors.new_error(path, "must be an object")
            continue
        height, name, action, args = step.get("height"), step.get("actor"), step.get("action"), step.get("args", {})
        if not is_integer(height) or (genesis_blocks is not None and height < genesis_blocks):
            errors.new_error(f"{path}.height", f"must be an integer >= genesis_blocks (got {height!r})")
            continue
        elif last_height is not None and height < last_height:
            errors.new_error(f"{path}.height", f"heights must be non-decreasing ({height} < {last_height})")
        last_height = height if last_height is None else max(height, last_height)
        if name not in by_name:
            errors.new_error(f"{path}.actor", f"unknown actor {name!r}")
            continue
        actor = by_name[name]
        cls = behavior_class(actor.role, actor.behavior)
        if action not in cls.actions:
            errors.new_error(
                f"{path}.action", f"{actor.role} {name} cannot {action!r} (allowed: {', '.join(cls.actions)})"
            )
            continue
        if action == "init2" and history is not None and height - 1 < history:
            errors.new_error(
                f"{path}.height",
                f"init2 at {height} selects from block {height - 1}, too early for {history} training indexes",
            )
        if not isinstance(args, dict):
            errors.new_error(f"{path}.args", "must be an object")
            continue
        steps.append(Step(height=height, actor=name, action=action, args=args))
    return steps


def scenario_from_dict(data, name="scenario", base_dir=None, seed=None):
    """Validate a parsed scenario document and build its `ScenarioConfig`

    Every problem found is collected before raising
    `ScenarioValidationErrors`, so a single run reports all of them."""

    errors = ScenarioValidationErrors()
    if not isinstance(data, dict):
        errors.new_error("", "A scenario must be a JSON object")
        raise errors
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        errors.new_error("", f"unknown sections: {', '.join(unknown)}")

    version = data.get("version")
    if version != SCHEMA_VERSION:
        errors.new_error("version", f"must be {SCHEMA_VERSION} (got {version!r})")
    seed = clean_seed(data.get("seed", 0) if seed is None else seed, errors)
    genesis_blocks = data.get("genesis_blocks", DEFAULT_GENESIS_BLOCKS)
    if not is_integer(genesis_blocks) or genesis_blocks < 1:
        errors.new_error("genesis_blocks", f"must be an integer >= 1 (got {genesis_blocks!r})")
        genesis_blocks = None
    gas_schedule = clean_gas_schedule(data.get("gas_schedule", {}), errors)
    contract = clean_contract(data.get("contract"), errors)
    points = clean_dataset(data.get("dataset"), errors, base_dir)
    if points and contract is not None:
        check_dataset_fits(points, contract, errors)
    actors = clean_actors(data.get("actors"), errors, contract, base_dir)
    steps = clean_schedule(data.get("schedule"), errors, actors, genesis_blocks, init2_history(points, contract))
    errors.raise_if_errors()

    return ScenarioConfig(
        name=name,
        version=version,
        seed=seed,
        genesis_blocks=genesis_blocks,
        gas_schedule=gas_schedule,
        contract=contract,
        points=tuple(points),
        actors=tuple(actors),
        steps=tuple(steps),
        base_dir=str(base_dir) if base_dir is not None else None,
    )
