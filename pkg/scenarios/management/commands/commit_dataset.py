from django.core.management.base import BaseCommand, CommandError

from scenarios.commands import EXPECTED_ERRORS, CommitDatasetCommand
from scenarios.report import FORMATS, TEXT


class Command(BaseCommand):
    help = "Split a CSV dataset into data groups and print their nonces and digests"

    def add_arguments(self, parser):
        parser.add_argument("dataset", help="CSV file (optionally .gz/.xz) with input_* and label columns")
        parser.add_argument("--group-size", type=int)
        parser.add_argument("--seed", type=int, default=0, help="Seed of the nonce generator")
        parser.add_argument("--groups-dir", help="Also save every data group as a CSV file here")
        parser.add_argument("--out", help="Save the commitments to this file instead of printing them")
        parser.add_argument("--format", dest="output_format", choices=FORMATS, default=TEXT)

    def handle(self, *args, **kwargs):
        try:
            CommitDatasetCommand.execute(
                kwargs["dataset"],
                self.stdout,
                group_size=kwargs["group_size"],
                seed=kwargs["seed"],
                out=kwargs["out"],
                groups_dir=kwargs["groups_dir"],
                output_format=kwargs["output_format"],
            )
        except EXPECTED_ERRORS as exc:
            raise CommandError(str(exc))
