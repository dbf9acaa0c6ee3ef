from django.core.management.base import BaseCommand, CommandError

from scenarios.commands import EXPECTED_ERRORS, GasReportCommand
from scenarios.report import FORMATS, TEXT

MNIST_BYTES = 11_594_722


class Command(BaseCommand):
    help = "Cost of writing payloads to contract storage (gas, ETH, USD)"

    def add_arguments(self, parser):
        parser.add_argument(
            "--bytes", dest="payload_sizes", type=int, nargs="*", default=[1024, MNIST_BYTES], help="Payload sizes",
        )
        parser.add_argument("--gas-limit", type=int)
        parser.add_argument("--gas-price-gwei")
        parser.add_argument("--eth-usd")
        parser.add_argument("--out", help="Save the table to this file instead of printing it")
        parser.add_argument("--format", dest="output_format", choices=FORMATS, default=TEXT)

    def handle(self, *args, **kwargs):
        if any(size < 0 for size in kwargs["payload_sizes"]):
            raise CommandError("Payload sizes must not be negative")
        try:
            GasReportCommand.execute(
                kwargs["payload_sizes"],
                self.stdout,
                out=kwargs["out"],
                output_format=kwargs["output_format"],
                gas_limit=kwargs["gas_limit"],
                gas_price_gwei=kwargs["gas_price_gwei"],
                eth_usd=kwargs["eth_usd"],
            )
        except EXPECTED_ERRORS as exc:
            raise CommandError(str(exc))
