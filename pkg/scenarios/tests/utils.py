from copy import deepcopy

from django.test import SimpleTestCase

from scenarios.config import load_scenario
from scenarios.runner import run_scenario

S = 2 ** 20
SEPARATING_MODEL = {"weights": [[[S, -S], [-S, S]], [[0, S], [S, 0]]], "biases": [[0, 0], [0, 0]]}
BASE_SCENARIO = {
    "version": 1,
    "seed": 1,
    "genesis_blocks": 20,
    "contract": {
        "reward": 500,
        "submission_period": 5,
        "test_reveal_period": 3,
        "evaluation_period": 5,
        "init2_block_limit": 5,
        "group_size": 5,
        "training_fraction": "4/5",
        "min_accuracy": "0.5",
        "model_shape": [2, 2, 2],
    },
    "dataset": {"synthetic": {"points": 25, "seed": 3}},
    "actors": [
        {"name": "olivia", "role": "organizer"},
        {"name": "sam", "role": "submitter", "params": {"model": SEPARATING_MODEL}},
    ],
    "schedule": [
        {"height": 20, "actor": "olivia", "action": "init1"},
        {"height": 21, "actor": "olivia", "action": "init2"},
        {"height": 22, "actor": "olivia", "action": "init3"},
        {"height": 23, "actor": "sam", "action": "submit"},
        {"height": 28, "actor": "olivia", "action": "reveal_test"},
        {"height": 29, "actor": "sam", "action": "evaluate"},
        {"height": 36, "actor": "sam", "action": "finalize"},
    ],
}


def scenario_data(**sections):
    """Copy of a small valid scenario document with some sections replaced"""

    data = deepcopy(BASE_SCENARIO)
    data.update(deepcopy(sections))
    return data


class BundledScenarioTestCase(SimpleTestCase):
    """Runs every bundled scenario once per test class"""

    scenarios = ()

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.reports = {name: run_scenario(load_scenario(name)) for name in cls.scenarios}

    def events(self, name, operation=None, outcome=None):
        return [
            event
            for event in self.reports[name].events
            if (operation is None or event["operation"] == operation)
            and (outcome is None or event["outcome"] == outcome)
        ]

    def analytics(self, name):
        return dict(self.reports[name].analytics)
