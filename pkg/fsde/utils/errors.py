class ConfigError(ValueError):
    """ Raised for invalid configuration documents and malformed input files. """


class NumericError(ArithmeticError):
    """ Raised when a computation leaves the representable or well-posed range. """


class EstimationError(ValueError):
    """ Raised when an estimator cannot be applied to the given sample path. """
