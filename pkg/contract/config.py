from collections import namedtuple
from fractions import Fraction

from django.conf import settings

from contract.exceptions import InvalidConfigError
from fixed_point.arithmetic import FixedPoint, from_ratio
from fixed_point.exceptions import ShapeMismatchError
from fixed_point.network import ModelDefinition
from partitioning.exceptions import PartitionConfigError
from partitioning.selection import parse_fraction

BEST, FIRST_PASSING = "best", "first_passing"
SELECTION_CHOICES = (BEST, FIRST_PASSING)
PERIOD_FIELDS = ("submission_period", "evaluation_period", "test_reveal_period", "init2_block_limit")

ContractConfig = namedtuple(
    "ContractConfig",
    [
        "reward",
        "submission_period",
        "evaluation_period",
        "test_reveal_period",
        "init2_block_limit",
        "group_size",
        "training_fraction",
        "min_accuracy",
        "model_shape",
        "selection",
        "scale_bits",
    ],
)


def is_positive_integer(value):
    return isinstance(value, int) and not isinstance(value, bool) and value >= 1


def with_defaults(values):
    """Copy of `values` with the optional fields filled from settings"""

    values = dict(values)
    values.setdefault("init2_block_limit", settings.DANKU_INIT2_BLOCK_LIMIT)
    values.setdefault("group_size", settings.DANKU_GROUP_SIZE)
    values.setdefault("training_fraction", settings.DANKU_TRAINING_FRACTION)
    values.setdefault("selection", BEST)
    values.setdefault("scale_bits", settings.DANKU_SCALE_BITS)
    return values


def contract_config_errors(values):
    """List of (field, message) for every invalid field in `values`

    `values` is a dict with the raw (already parsed from JSON) field values;
    missing optional fields take their defaults from settings."""

    values = with_defaults(values)
    errors = []
    reward = values.get("reward")
    if not is_positive_integer(reward):
        errors.append(("reward", f"must be a positive integer amount (got {reward!r})"))
    for field in PERIOD_FIELDS + ("group_size",):
        value = values.get(field)
        if not is_positive_integer(value):
            errors.append((field, f"must be an integer >= 1 (got {value!r})"))

    try:
        fraction = parse_fraction(values.get("training_fraction"))
        if not 0 < fraction < 1:
            errors.append(("training_fraction", f"must be in (0, 1) (got {fraction})"))
    except PartitionConfigError as exc:
        errors.append(("training_fraction", str(exc)))

    min_accuracy = values.get("min_accuracy")
    if isinstance(min_accuracy, FixedPoint):
        min_accuracy = Fraction(min_accuracy.mantissa, min_accuracy.denominator)
    try:
        if not 0 <= Fraction(str(min_accuracy)) <= 1:
            errors.append(("min_accuracy", f"must be in [0, 1] (got {min_accuracy})"))
    except (ValueError, ZeroDivisionError):
        errors.append(("min_accuracy", f"must be a number (got {min_accuracy!r})"))

    try:
        ModelDefinition.create(values.get("model_shape") or ())
    except (ShapeMismatchError, TypeError) as exc:
        errors.append(("model_shape", str(exc)))

    if values.get("selection", BEST) not in SELECTION_CHOICES:
        errors.append(("selection", f"must be one of {', '.join(SELECTION_CHOICES)}"))
    scale_bits = values.get("scale_bits", settings.DANKU_SCALE_BITS)
    if not is_positive_integer(scale_bits):
        errors.append(("scale_bits", f"must be an integer >= 1 (got {scale_bits!r})"))
    return errors


def make_contract_config(**values):
    values = with_defaults(values)
    errors = contract_config_errors(values)
    if errors:
        raise InvalidConfigError(errors)

    scale_bits = values["scale_bits"]
    min_accuracy = values["min_accuracy"]
    if not isinstance(min_accuracy, FixedPoint):
        ratio = Fraction(str(min_accuracy))
        min_accuracy = from_ratio(ratio.numerator, ratio.denominator, scale_bits)
    return ContractConfig(
        reward=values["reward"],
        submission_period=values["submission_period"],
        evaluation_period=values["evaluation_period"],
        test_reveal_period=values["test_reveal_period"],
        init2_block_limit=values["init2_block_limit"],
        group_size=values["group_size"],
        training_fraction=parse_fraction(values["training_fraction"]),
        min_accuracy=min_accuracy,
        model_shape=ModelDefinition.create(values["model_shape"]),
        selection=values["selection"],
        scale_bits=scale_bits,
    )
