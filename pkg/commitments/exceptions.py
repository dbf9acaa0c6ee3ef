class MalformedGroupError(ValueError):
    """
    Raised when a data group (or its nonce) cannot be canonically serialized:
    points with different input dimensions, non-integer scalars or values that
    do not fit a 32-byte word
    """


class DatasetFileError(ValueError):
    """
    Raised when a dataset/group file is missing the expected columns
    """
