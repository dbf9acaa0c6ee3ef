from django.core.management.base import BaseCommand, CommandError

from scenarios.commands import EXPECTED_ERRORS, RunScenarioCommand
from scenarios.config import bundled_scenarios
from scenarios.report import FORMATS, TEXT


class Command(BaseCommand):
    help = "Run a scenario file (or a bundled scenario) and print its report"

    def add_arguments(self, parser):
        parser.add_argument("scenario", help=f"Scenario file or bundled name ({', '.join(bundled_scenarios())})")
        parser.add_argument("--seed", type=int, help="Override the seed of the scenario file")
        parser.add_argument("--out", help="Save the report to this file instead of printing it")
        parser.add_argument("--format", dest="output_format", choices=FORMATS, default=TEXT)

    def handle(self, *args, **kwargs):
        try:
            RunScenarioCommand.execute(
                kwargs["scenario"],
                self.stdout,
                seed=kwargs["seed"],
                out=kwargs["out"],
                output_format=kwargs["output_format"],
            )
        except EXPECTED_ERRORS as exc:
            raise CommandError(str(exc))
