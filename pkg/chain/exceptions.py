class BlockOutOfRangeError(IndexError):
    """
    Raised when asking for the hash of a block that was not mined yet
    """


class OutOfGasError(Exception):
    """
    Raised by the gas meter when a transaction goes over its gas limit
    """

    def __init__(self, used, limit, reason):
        super().__init__(f"Out of gas while charging {reason!r}: {used} > {limit}")
        self.used = used
        self.limit = limit
        self.reason = reason


class GasScheduleError(ValueError):
    """
    Raised when a gas schedule has a non-positive value
    """
