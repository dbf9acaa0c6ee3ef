import decimal
import random
from pathlib import Path

import rows
from django.conf import settings

from chain.exceptions import GasScheduleError
from chain.gas import GasSchedule
from commitments.exceptions import DatasetFileError, MalformedGroupError
from commitments.groups import export_points, load_points, make_group
from commitments.hashing import commit_groups, hash_data_group, verify_reveal
from fixed_point.exceptions import ModelFileError
from partitioning.exceptions import PartitionConfigError, TargetSetError
from partitioning.probability import OVERLAPPING
from scenarios.analytics import gas_report, probability_table
from scenarios.config import load_scenario
from scenarios.exceptions import ScenarioValidationErrors, UnknownScenarioError
from scenarios.report import TEXT, render_report, render_table
from scenarios.runner import run_scenario
from utils.conversion import make_table

# Errors caused by user input: management commands turn them into CommandError
EXPECTED_ERRORS = (
    DatasetFileError,
    decimal.InvalidOperation,
    GasScheduleError,
    MalformedGroupError,
    ModelFileError,
    OSError,
    PartitionConfigError,
    ScenarioValidationErrors,
    TargetSetError,
    UnknownScenarioError,
    ValueError,
)
COMMITMENT_FIELDS = [
    ("index", rows.fields.IntegerField),
    ("nonce", rows.fields.TextField),
    ("digest", rows.fields.TextField),
]


def parse_nonce(value):
    """
    >>> parse_nonce("0x10"), parse_nonce("16")
    (16, 16)
    """

    return int(str(value), 0)


def parse_digest(value):
    value = str(value).lower()
    digest = bytes.fromhex(value[2:] if value.startswith("0x") else value)
    if len(digest) != 32:
        raise ValueError(f"A digest has 32 bytes (got {len(digest)})")
    return digest


class SimulatorCommand:
    def __init__(self, stdout):
        self.stdout = stdout

    def debug(self, message, end="\n"):
        self.stdout.write(message + end)

    def write_output(self, content, out=None):
        if out:
            Path(out).write_text(content)
            self.debug(f"Saved to {out}")
        else:
            self.stdout.write(content)


class RunScenarioCommand(SimulatorCommand):
    @classmethod
    def execute(cls, scenario, stdout, seed=None, out=None, output_format=TEXT):
        self = cls(stdout)
        config = load_scenario(scenario, seed=seed)
        if out:
            self.debug(f"Running {config.name} with seed {config.seed} ({len(config.steps)} scheduled actions)")
        report = run_scenario(config, progress=settings.DANKU_SHOW_PROGRESS)
        self.write_output(render_report(report, output_format), out)
        return report


class ProbTableCommand(SimulatorCommand):
    @classmethod
    def execute(
        cls,
        group_values,
        stdout,
        training_fraction=None,
        block_limit=None,
        trials=None,
        seed=0,
        window=OVERLAPPING,
        out=None,
        output_format=TEXT,
        workers=None,
    ):
        self = cls(stdout)
        if training_fraction is None:
            training_fraction = settings.DANKU_TRAINING_FRACTION
        if block_limit is None:
            block_limit = settings.DANKU_INIT2_BLOCK_LIMIT
        trials = settings.DANKU_MC_TRIALS if trials is None else trials
        table = probability_table(
            group_values,
            training_fraction,
            block_limit,
            trials,
            seed=seed,
            window=window,
            progress=settings.DANKU_SHOW_PROGRESS,
            workers=workers,
        )
        self.write_output(render_table(table, output_format), out)
        return table


class GasReportCommand(SimulatorCommand):
    @classmethod
    def execute(cls, payload_sizes, stdout, out=None, output_format=TEXT, **schedule_overrides):
        self = cls(stdout)
        schedule = GasSchedule.default(
            **{name: value for name, value in schedule_overrides.items() if value is not None}
        )
        table = gas_report(schedule, payload_sizes)
        self.write_output(render_table(table, output_format), out)
        return table


class VerifyCommitmentCommand(SimulatorCommand):
    @classmethod
    def execute(cls, group_file, nonce, digest, stdout):
        self = cls(stdout)
        group = make_group(load_points(group_file))
        nonce, digest = parse_nonce(nonce), parse_digest(digest)
        valid = verify_reveal(digest, group, nonce)
        if valid:
            self.debug(f"valid: {group_file} with nonce {nonce:#x} hashes to 0x{digest.hex()}")
        else:
            actual = hash_data_group(group, nonce)
            self.debug(f"invalid: {group_file} with nonce {nonce:#x} hashes to 0x{actual.hex()}")
        return valid


class CommitDatasetCommand(SimulatorCommand):
    @classmethod
    def execute(cls, dataset, stdout, group_size=None, seed=0, out=None, groups_dir=None, output_format=TEXT):
        """Split `dataset` into groups, draw a nonce per group and write the
        resulting hashed data groups (and optionally one CSV per group)"""

        self = cls(stdout)
        group_size = group_size or settings.DANKU_GROUP_SIZE
        committed = commit_groups(load_points(dataset), group_size, random.Random(seed))
        if groups_dir:
            Path(groups_dir).mkdir(parents=True, exist_ok=True)
            for index, item in enumerate(committed):
                export_points(list(item.group.points), Path(groups_dir) / f"group_{index:04d}.csv")
            self.debug(f"{len(committed)} group files saved to {groups_dir}")

        data = [
            {"index": index, "nonce": f"{item.nonce:#x}", "digest": f"0x{item.digest.hex()}"}
            for index, item in enumerate(committed)
        ]
        self.write_output(render_table(make_table(COMMITMENT_FIELDS, data), output_format), out)
        return committed
