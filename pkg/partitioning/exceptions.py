from chain.exceptions import BlockOutOfRangeError


class InsufficientHistoryError(BlockOutOfRangeError):
    """
    Raised when there are not enough mined blocks to seed the selection
    """


class PartitionConfigError(ValueError):
    """
    Raised when G x TP is not an integer strictly between 0 and G
    """


class TargetSetError(ValueError):
    """
    Raised when the target training set of a Monte Carlo run has the wrong size
    """
