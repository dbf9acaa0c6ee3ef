from django.core.management.base import BaseCommand, CommandError

from scenarios.commands import EXPECTED_ERRORS, VerifyCommitmentCommand


class Command(BaseCommand):
    help = "Check that a data group file and a nonce hash to a given digest"

    def add_arguments(self, parser):
        parser.add_argument("group_file", help="CSV file with input_* and label columns")
        parser.add_argument("nonce", help="Decimal or 0x-prefixed hexadecimal")
        parser.add_argument("digest", help="Hexadecimal keccak-256 digest")

    def handle(self, *args, **kwargs):
        try:
            valid = VerifyCommitmentCommand.execute(
                kwargs["group_file"], kwargs["nonce"], kwargs["digest"], self.stdout
            )
        except EXPECTED_ERRORS as exc:
            raise CommandError(str(exc))
        if not valid:
            raise CommandError("Data group does not match the digest")
