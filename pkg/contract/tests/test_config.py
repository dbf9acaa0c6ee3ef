from fractions import Fraction

import pytest
from django.test import SimpleTestCase, override_settings

from contract.config import BEST, contract_config_errors, make_contract_config
from contract.exceptions import InvalidConfigError
from fixed_point.arithmetic import from_ratio

VALID = {
    "reward": 1000,
    "submission_period": 5,
    "evaluation_period": 5,
    "test_reveal_period": 3,
    "min_accuracy": "0.6",
    "model_shape": [2, 2, 2],
}


class ContractConfigTests(SimpleTestCase):
    @override_settings(DANKU_INIT2_BLOCK_LIMIT=7, DANKU_GROUP_SIZE=4, DANKU_TRAINING_FRACTION="1/2")
    def test_defaults_from_settings(self):
        config = make_contract_config(**VALID)

        assert config.init2_block_limit == 7
        assert config.group_size == 4
        assert config.training_fraction == Fraction(1, 2)
        assert config.selection == BEST
        assert config.min_accuracy == from_ratio(3, 5, config.scale_bits)
        assert config.model_shape.layer_sizes == (2, 2, 2)

    def test_every_invalid_field_is_reported(self):
        values = dict(VALID, reward=0, evaluation_period=1.5, min_accuracy="1.2", model_shape=[2], selection="worst")

        with pytest.raises(InvalidConfigError) as excinfo:
            make_contract_config(**values)
        fields = [field for field, message in excinfo.value.errors]
        assert fields == ["reward", "evaluation_period", "min_accuracy", "model_shape", "selection"]
        assert str(excinfo.value).startswith("reward: ")

    def test_training_fraction(self):
        assert [field for field, message in contract_config_errors(dict(VALID, training_fraction="1"))] == [
            "training_fraction"
        ]
        assert [field for field, message in contract_config_errors(dict(VALID, training_fraction="x"))] == [
            "training_fraction"
        ]

    def test_booleans_are_not_periods(self):
        errors = contract_config_errors(dict(VALID, submission_period=True))

        assert [field for field, message in errors] == ["submission_period"]

    def test_non_numeric_min_accuracy(self):
        errors = contract_config_errors(dict(VALID, min_accuracy="high"))

        assert [field for field, message in errors] == ["min_accuracy"]

    def test_missing_optional_fields_take_defaults(self):
        assert contract_config_errors(VALID) == []

    @override_settings(DANKU_GROUP_SIZE=0)
    def test_defaults_are_validated_too(self):
        assert [field for field, message in contract_config_errors(VALID)] == ["group_size"]
