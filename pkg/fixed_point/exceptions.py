class ArithmeticOverflowError(ArithmeticError):
    """
    Raised when a fixed-point result does not fit a signed 256-bit word
    """


class ScaleMismatchError(ValueError):
    """
    Raised when combining fixed-point numbers with different scale exponents
    """


class ShapeMismatchError(ValueError):
    """
    Raised when weights, biases or inputs do not match the model definition
    """


class EmptyDatasetError(ValueError):
    """
    Raised when computing the accuracy over no data points
    """


class ModelFileError(ValueError):
    """
    Raised when a model interchange file cannot be parsed
    """
