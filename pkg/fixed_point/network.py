from collections import namedtuple

from chain.gas import NoGasMeter
from fixed_point.arithmetic import fixed, fp_add, fp_div, fp_mul, from_int, relu
from fixed_point.exceptions import EmptyDatasetError, ShapeMismatchError


class ModelDefinition(namedtuple("ModelDefinition", ["layer_sizes"])):
    __slots__ = ()

    @classmethod
    def create(cls, layer_sizes):
        layer_sizes = tuple(layer_sizes)
        if len(layer_sizes) < 2:
            raise ShapeMismatchError("A model needs at least an input and an output layer")
        elif not all(isinstance(size, int) and size >= 1 for size in layer_sizes):
            raise ShapeMismatchError(f"Layer sizes must be positive integers (got {list(layer_sizes)})")
        return cls(layer_sizes=layer_sizes)

    @property
    def input_dim(self):
        return self.layer_sizes[0]

    @property
    def output_dim(self):
        return self.layer_sizes[-1]

    @property
    def transitions(self):
        """(fan_in, fan_out) for every pair of consecutive layers"""

        return list(zip(self.layer_sizes[:-1], self.layer_sizes[1:]))

    @property
    def parameter_count(self):
        return sum(fan_in * fan_out + fan_out for fan_in, fan_out in self.transitions)


# weights[layer][output][input] and biases[layer][output] are mantissas
WeightsBiases = namedtuple("WeightsBiases", ["weights", "biases"])


def make_weights_biases(weights, biases):
    return WeightsBiases(
        weights=tuple(tuple(tuple(row) for row in matrix) for matrix in weights),
        biases=tuple(tuple(vector) for vector in biases),
    )


def check_shapes(model, params):
    transitions = model.transitions
    if len(params.weights) != len(transitions) or len(params.biases) != len(transitions):
        raise ShapeMismatchError(f"Expected parameters for {len(transitions)} layer transitions")
    for layer, (fan_in, fan_out) in enumerate(transitions):
        matrix, vector = params.weights[layer], params.biases[layer]
        if len(matrix) != fan_out or any(len(row) != fan_in for row in matrix):
            raise ShapeMismatchError(f"Weights of layer {layer} must be {fan_out}x{fan_in}")
        if len(vector) != fan_out:
            raise ShapeMismatchError(f"Biases of layer {layer} must have {fan_out} entries")


def forward_pass(model, params, inputs, meter=None):
    """Dense feed-forward pass: ReLU(W.x + b) on hidden layers, raw W.x + b
    on the output layer

    `meter` is charged one unit per multiply, add and ReLU comparison."""

    meter = meter or NoGasMeter()
    check_shapes(model, params)
    if len(inputs) != model.input_dim:
        raise ShapeMismatchError(f"Expected {model.input_dim} inputs (got {len(inputs)})")

    scale_bits = inputs[0].scale_bits
    values = list(inputs)
    last_layer = len(model.transitions) - 1
    for layer, (fan_in, fan_out) in enumerate(model.transitions):
        hidden = layer != last_layer
        meter.compute(fan_out * fan_in * 2 + (fan_out if hidden else 0))
        outputs = []
        for row, bias in zip(params.weights[layer], params.biases[layer]):
            total = fixed(bias, scale_bits)
            for weight, value in zip(row, values):
                total = fp_add(total, fp_mul(fixed(weight, scale_bits), value))
            outputs.append(relu(total) if hidden else total)
        values = outputs
    return values


def argmax(scores):
    """Index of the highest score; ties go to the lowest index"""

    best = 0
    for index in range(1, len(scores)):
        if scores[index].mantissa > scores[best].mantissa:
            best = index
    return best


def lift_inputs(inputs, scale_bits=None):
    return [from_int(value, scale_bits) for value in inputs]


def predict(model, params, inputs, meter=None):
    meter = meter or NoGasMeter()
    scores = forward_pass(model, params, inputs, meter)
    meter.compute(len(scores) - 1)
    return argmax(scores)


def accuracy(model, params, dataset, scale_bits=None, meter=None):
    """Fraction of `dataset` points whose predicted label is right, as a
    FixedPoint computed with integer division"""

    meter = meter or NoGasMeter()
    dataset = list(dataset)
    if not dataset:
        raise EmptyDatasetError("Cannot compute the accuracy of an empty dataset")

    correct = 0
    for point in dataset:
        meter.compute(len(point.inputs))  # lifting inputs to fixed point
        if predict(model, params, lift_inputs(point.inputs, scale_bits), meter) == point.label:
            correct += 1
    meter.compute(len(dataset) + 1)
    return fp_div(from_int(correct, scale_bits), from_int(len(dataset), scale_bits))


def evaluation_cost(model, dataset_size):
    """Units a meter is charged by `accuracy` for `dataset_size` points"""

    per_point = model.input_dim + model.output_dim - 1
    for layer, (fan_in, fan_out) in enumerate(model.transitions):
        per_point += fan_out * fan_in * 2 + (fan_out if layer != len(model.transitions) - 1 else 0)
    return per_point * dataset_size + dataset_size + 1


def random_weights_biases(model, rng, scale_bits, magnitude=1):
    """Seeded dyadic parameters in [-magnitude, magnitude]; stands in for
    models trained off-chain"""

    limit = magnitude * 2 ** scale_bits
    weights, biases = [], []
    for fan_in, fan_out in model.transitions:
        weights.append([[rng.randint(-limit, limit) for _ in range(fan_in)] for _ in range(fan_out)])
        biases.append([rng.randint(-limit, limit) for _ in range(fan_out)])
    return make_weights_biases(weights, biases)
