class ContractError(Exception):
    """
    Base class for every rejected contract transaction. A rejected
    transaction leaves the contract state untouched
    """


class InvalidConfigError(ContractError):
    """
    Raised when a contract configuration has invalid fields
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__(" - ".join(f"{field}: {message}" for field, message in self.errors))


class WrongPhaseError(ContractError):
    """
    Raised when an operation is called in a phase that does not allow it
    """


class DeadlineError(ContractError):
    """
    Raised when an operation is called outside of its period
    """


class UnauthorizedError(ContractError):
    """
    Raised when an organizer-only operation is called by someone else
    """


class DepositMismatchError(ContractError):
    """
    Raised when the deposit sent to init1 is different from the reward
    """


class InvalidCommitmentsError(ContractError):
    """
    Raised when the hashed data groups cannot be split by the training fraction
    """


class RevealMismatchError(ContractError):
    """
    Raised when revealed data groups do not match the committed hashes or
    the expected index set
    """


class UnknownSubmissionError(ContractError):
    """
    Raised when a submission id does not exist
    """


class AlreadyEvaluatedError(ContractError):
    """
    Raised when evaluating a submission a second time
    """


class SubmissionShapeError(ContractError):
    """
    Raised when a submission does not match the contract's model definition
    """


class ChainHistoryError(ContractError):
    """
    Raised when the chain does not have enough blocks to seed the partitioning
    """


class GasLimitExceededError(ContractError):
    """
    Raised when a transaction needs more gas than the gas limit
    """


class EvaluationError(ContractError):
    """
    Raised when a submitted model cannot be evaluated (fixed-point overflow)
    """
