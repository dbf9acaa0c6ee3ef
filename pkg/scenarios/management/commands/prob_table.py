from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from partitioning.probability import OVERLAPPING, WINDOW_MODES
from scenarios.commands import EXPECTED_ERRORS, ProbTableCommand
from scenarios.report import FORMATS, TEXT


class Command(BaseCommand):
    help = "Probability that an organizer picks the training set, per number of data groups"

    def add_arguments(self, parser):
        parser.add_argument("--groups", default="5,10,15,20,25,30", help="Comma-separated group counts")
        parser.add_argument("--tp", default=settings.DANKU_TRAINING_FRACTION, help="Training fraction, like 4/5")
        parser.add_argument("--limit", type=int, default=settings.DANKU_INIT2_BLOCK_LIMIT, help="init2 block limit")
        parser.add_argument("--trials", type=int, default=settings.DANKU_MC_TRIALS, help="0 to skip Monte Carlo")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--window", choices=WINDOW_MODES, default=OVERLAPPING)
        parser.add_argument(
            "--workers", type=int, default=settings.DANKU_MC_WORKERS, help="Processes running Monte Carlo trials"
        )
        parser.add_argument("--out", help="Save the table to this file instead of printing it")
        parser.add_argument("--format", dest="output_format", choices=FORMATS, default=TEXT)

    def clean_groups(self, value):
        try:
            return [int(item) for item in value.split(",") if item.strip()]
        except ValueError:
            raise CommandError(f"Invalid --groups: {value}")

    def handle(self, *args, **kwargs):
        if kwargs["trials"] < 0:
            raise CommandError("--trials must not be negative")
        if kwargs["workers"] < 1:
            raise CommandError("--workers must be at least 1")
        try:
            ProbTableCommand.execute(
                self.clean_groups(kwargs["groups"]),
                self.stdout,
                training_fraction=kwargs["tp"],
                block_limit=kwargs["limit"],
                trials=kwargs["trials"],
                seed=kwargs["seed"],
                window=kwargs["window"],
                workers=kwargs["workers"],
                out=kwargs["out"],
                output_format=kwargs["output_format"],
            )
        except EXPECTED_ERRORS as exc:
            raise CommandError(str(exc))
