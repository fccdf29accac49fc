'''
Leaky rectified linear unit.
'''
import numpy as np

from .._errors import ValidationError

DEFAULT_SLOPE = 0.01


def _check_slope(slope):
    if not 0 < slope < 1:
        raise ValidationError('leaky slope must be in (0, 1), got {0}'.format(slope))


def leaky_relu(x, slope=DEFAULT_SLOPE):
    '''
    ``x`` where ``x > 0``, otherwise ``slope * x``.
    '''
    _check_slope(slope)
    return np.where(x > 0, x, x * x.dtype.type(slope))


def leaky_relu_backward(x, grad_out, slope=DEFAULT_SLOPE):
    '''
    Gradient of :py:func:`leaky_relu` at `x`; the subgradient at 0 is `slope`.
    '''
    _check_slope(slope)
    return grad_out * np.where(x > 0, x.dtype.type(1), x.dtype.type(slope))
