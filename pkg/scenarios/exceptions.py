class ScenarioValidationErrors(Exception):
    """
    Holds every error message found while validating a scenario file, each
    one starting with the path of the offending field
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._error_messages = []

    def new_error(self, path, msg):
        message = f"{path}: {msg}" if path else msg
        if message not in self._error_messages:
            self._error_messages.append(message)

    @property
    def error_messages(self):
        return list(self._error_messages)

    def raise_if_errors(self):
        if self.error_messages:
            raise self

    def __str__(self):
        return " - ".join(self.error_messages)


class InvariantViolationError(Exception):
    """
    Raised when a scenario run breaks fund conservation or phase ordering
    """


class UnknownScenarioError(ValueError):
    """
    Raised when a scenario name is neither a file nor a bundled scenario
    """
