"""Model interchange files.

A model file is a JSON document with, in this order:

    layer_sizes   [input_dim, hidden..., output_dim]
    scale_bits    fixed-point scale exponent f (values are mantissa / 2**f)
    weights       one fan_out x fan_in matrix of integer mantissas per layer transition
    biases        one fan_out vector of integer mantissas per layer transition
"""

import json
from collections import OrderedDict
from pathlib import Path

from fixed_point.exceptions import ModelFileError, ShapeMismatchError
from fixed_point.network import ModelDefinition, check_shapes, make_weights_biases

FIELDS = ("layer_sizes", "scale_bits", "weights", "biases")


def is_integer_tree(value):
    if isinstance(value, list):
        return all(is_integer_tree(item) for item in value)
    return isinstance(value, int) and not isinstance(value, bool)


def model_from_dict(data, scale_bits=None):
    missing = [field for field in FIELDS if field not in data]
    if missing:
        raise ModelFileError(f"Missing fields: {', '.join(missing)}")
    if scale_bits is not None and data["scale_bits"] != scale_bits:
        raise ModelFileError(f"Model uses scale 2**-{data['scale_bits']}, expected 2**-{scale_bits}")
    if not is_integer_tree(data["weights"]) or not is_integer_tree(data["biases"]):
        raise ModelFileError("Weights and biases must be integer mantissas")

    try:
        model = ModelDefinition.create(data["layer_sizes"])
        params = make_weights_biases(data["weights"], data["biases"])
        check_shapes(model, params)
    except (ShapeMismatchError, TypeError) as exc:
        raise ModelFileError(str(exc))
    return model, params


def model_to_dict(model, params, scale_bits):
    return OrderedDict(
        [
            ("layer_sizes", list(model.layer_sizes)),
            ("scale_bits", scale_bits),
            ("weights", [[list(row) for row in matrix] for matrix in params.weights]),
            ("biases", [list(vector) for vector in params.biases]),
        ]
    )


def load_model_file(filename, scale_bits=None):
    try:
        data = json.loads(Path(filename).read_text())
    except (OSError, ValueError) as exc:
        raise ModelFileError(f"Cannot read model file {filename}: {exc}")
    return model_from_dict(data, scale_bits)


def dump_model_file(filename, model, params, scale_bits):
    Path(filename).write_text(json.dumps(model_to_dict(model, params, scale_bits), indent=2) + "\n")
