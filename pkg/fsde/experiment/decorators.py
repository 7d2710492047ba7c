import functools

from fsde.utils.errors import NumericError, EstimationError
from fsde.utils.logging import get_logger

logger = get_logger(__name__)

CAPTURED_ERRORS = (NumericError, EstimationError, FloatingPointError)


def capture_failure(f):
    """ Turns numerical and estimation failures of f into a logged None result. """

    @functools.wraps(f)
    def apply_func(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except CAPTURED_ERRORS as e:
            logger.warning(f'Captured {type(e).__name__} in {f.__name__}: {e}')
            return None
    return apply_func
