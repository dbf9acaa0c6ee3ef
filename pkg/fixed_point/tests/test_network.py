import random

import numpy as np
import pytest
from django.test import SimpleTestCase

from chain.gas import GasMeter
from commitments.groups import make_point
from fixed_point.arithmetic import from_int, from_ratio, to_float
from fixed_point.exceptions import EmptyDatasetError, ShapeMismatchError
from fixed_point.network import (
    ModelDefinition,
    accuracy,
    argmax,
    check_shapes,
    evaluation_cost,
    forward_pass,
    lift_inputs,
    make_weights_biases,
    predict,
    random_weights_biases,
)
from scenarios.datasets import synthetic_points

SCALE = 20
S = 2 ** SCALE
SEPARATING = make_weights_biases([[[S, -S], [-S, S]], [[0, S], [S, 0]]], [[0, 0], [0, 0]])
CONSTANT = make_weights_biases([[[0, 0], [0, 0]], [[0, 0], [0, 0]]], [[0, 0], [S, 0]])


def numpy_forward(model, params, inputs):
    values = np.array(inputs, dtype=float)
    last_layer = len(model.transitions) - 1
    for layer in range(len(model.transitions)):
        weights = np.array(params.weights[layer], dtype=float) / S
        biases = np.array(params.biases[layer], dtype=float) / S
        values = weights @ values + biases
        if layer != last_layer:
            values = np.maximum(values, 0)
    return values


class ModelDefinitionTests(SimpleTestCase):
    def test_properties(self):
        model = ModelDefinition.create([4, 3, 2])

        assert (model.input_dim, model.output_dim) == (4, 2)
        assert model.transitions == [(4, 3), (3, 2)]
        assert model.parameter_count == 4 * 3 + 3 + 3 * 2 + 2

    def test_invalid(self):
        with pytest.raises(ShapeMismatchError):
            ModelDefinition.create([3])
        with pytest.raises(ShapeMismatchError):
            ModelDefinition.create([3, 0, 2])
        with pytest.raises(ShapeMismatchError):
            ModelDefinition.create([3, "2"])

    def test_check_shapes(self):
        model = ModelDefinition.create([2, 2, 2])
        check_shapes(model, SEPARATING)

        with pytest.raises(ShapeMismatchError):
            check_shapes(ModelDefinition.create([2, 3, 2]), SEPARATING)
        with pytest.raises(ShapeMismatchError):
            check_shapes(model, make_weights_biases(SEPARATING.weights, [[0, 0], [0]]))


class ForwardPassTests(SimpleTestCase):
    def check_against_float(self, layer_sizes, networks, seed):
        model = ModelDefinition.create(layer_sizes)
        rng = random.Random(seed)
        max_fan_in = max(fan_in for fan_in, fan_out in model.transitions)
        for _ in range(networks):
            params = random_weights_biases(model, rng, SCALE)
            inputs = [rng.randint(-50, 50) for _ in range(model.input_dim)]
            max_weight = max(abs(weight) for matrix in params.weights for row in matrix for weight in row) / S
            bound = len(model.transitions) * max_fan_in * max_weight / S

            scores = forward_pass(model, params, lift_inputs(inputs, SCALE))
            expected = numpy_forward(model, params, inputs)
            assert np.all(np.abs(np.array([to_float(value) for value in scores]) - expected) <= bound)

            top_two = np.sort(expected)[-2:]
            if top_two[1] - top_two[0] > bound:
                assert predict(model, params, lift_inputs(inputs, SCALE)) == int(np.argmax(expected))

    def test_shallow_network_matches_float_computation(self):
        self.check_against_float([2, 16, 2], networks=1000, seed=5)

    def test_deep_network_matches_float_computation(self):
        self.check_against_float([8, 16, 16, 4], networks=1000, seed=6)

    def test_input_dimension(self):
        with pytest.raises(ShapeMismatchError):
            forward_pass(ModelDefinition.create([2, 2, 2]), SEPARATING, lift_inputs([1, 2, 3], SCALE))

    def test_predict(self):
        model = ModelDefinition.create([2, 2, 2])

        assert predict(model, SEPARATING, lift_inputs([5, 1], SCALE)) == 1
        assert predict(model, SEPARATING, lift_inputs([1, 5], SCALE)) == 0
        assert predict(model, CONSTANT, lift_inputs([5, 1], SCALE)) == 0

    def test_argmax_ties_go_to_the_lowest_index(self):
        scores = [from_int(1, SCALE), from_int(3, SCALE), from_int(3, SCALE)]

        assert argmax(scores) == 1
        assert argmax([from_int(0, SCALE)] * 4) == 0


class AccuracyTests(SimpleTestCase):
    def setUp(self):
        self.model = ModelDefinition.create([2, 2, 2])
        self.points = synthetic_points(40, seed=7)

    def test_separating_model(self):
        assert accuracy(self.model, SEPARATING, self.points, SCALE) == from_int(1, SCALE)

    def test_constant_model(self):
        zeros = sum(point.label == 0 for point in self.points)

        assert accuracy(self.model, CONSTANT, self.points, SCALE) == from_ratio(zeros, 40, SCALE)

    def test_partial_accuracy_is_an_integer_division(self):
        points = [make_point([5, 1], 1), make_point([1, 5], 1), make_point([2, 1], 0)]

        assert accuracy(self.model, SEPARATING, points, SCALE) == from_ratio(1, 3, SCALE)

    def test_empty_dataset(self):
        with pytest.raises(EmptyDatasetError):
            accuracy(self.model, SEPARATING, [], SCALE)

    def test_evaluation_cost_matches_the_meter(self):
        for layer_sizes, size in (([2, 2, 2], 20), ([2, 5, 3, 2], 7), ([2, 2], 1)):
            model = ModelDefinition.create(layer_sizes)
            params = random_weights_biases(model, random.Random(1), SCALE)
            meter = GasMeter(limit=10 ** 9)

            accuracy(model, params, self.points[:size], SCALE, meter)
            assert meter.used == evaluation_cost(model, size)

    def test_evaluation_cost_of_the_bundled_model(self):
        assert evaluation_cost(self.model, 20) == 441


def test_random_weights_are_seeded_and_bounded():
    model = ModelDefinition.create([2, 3, 2])

    first = random_weights_biases(model, random.Random(9), SCALE, magnitude=2)
    second = random_weights_biases(model, random.Random(9), SCALE, magnitude=2)
    assert first == second
    check_shapes(model, first)
    flat = [value for matrix in first.weights for row in matrix for value in row]
    assert all(-2 * S <= value <= 2 * S for value in flat)
