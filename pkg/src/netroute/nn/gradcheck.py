'''
Finite-difference verification of analytic gradients.
'''
from collections import namedtuple
import logging

import numpy as np

from .._errors import ValidationError

_LOGGER = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-4


class GradCheckReport(namedtuple('GradCheckReport', ['name', 'max_error', 'worst', 'checked'])):
    '''
    :ivar str name: What was checked.
    :ivar float max_error: Largest relative error seen.
    :ivar tuple worst: ``(input index, element index)`` of that error.
    :ivar int checked: Number of elements compared.
    '''
    __slots__ = ()

    def passed(self, tolerance=DEFAULT_TOLERANCE):
        return self.max_error <= tolerance

    def __str__(self):
        return '{0}: max relative error {1:.3e} over {2} elements'.format(
            self.name, self.max_error, self.checked
        )


def relative_error(analytic, numeric):
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)


def grad_check(func, inputs, grads, name='op', max_checks=None, seed=0):
    '''
    Compare analytic gradients with central differences.

    Each checked element ``x`` is perturbed by ``h = 1e-5 * max(1, |x|)``;
    the relative error is ``|a - n| / max(|a|, |n|, 1e-8)``.

    :param func: A callable returning a scalar from ``func(*inputs)``; it
        must read `inputs` in place.
    :param list inputs: float64 arrays, perturbed in place and restored.
    :param list grads: The analytic gradient of `func` for each input.
    :param int max_checks: Compare at most this many randomly chosen
        elements per input; all elements when ``None``.
    :rtype: GradCheckReport
    '''
    rng = np.random.default_rng(seed)
    worst_error, worst, checked = 0.0, None, 0
    for position, (values, grad) in enumerate(zip(inputs, grads)):
        if values.dtype != np.float64:
            raise ValidationError('gradient checks run in float64, input {0} is {1}'.format(position, values.dtype))
        if grad.shape != values.shape:
            raise ValidationError(
                'gradient {0} has shape {1}, expected {2}'.format(position, grad.shape, values.shape)
            )
        flat = values.reshape(-1)
        if not np.shares_memory(flat, values):
            raise ValidationError('input {0} must be contiguous'.format(position))
        elements = np.arange(flat.size)
        if max_checks is not None and flat.size > max_checks:
            elements = np.sort(rng.choice(flat.size, size=max_checks, replace=False))
        analytic = grad.reshape(-1)
        for element in elements:
            original = flat[element]
            step = 1e-5 * max(1.0, abs(original))
            flat[element] = original + step
            upper = func(*inputs)
            flat[element] = original - step
            lower = func(*inputs)
            flat[element] = original
            numeric = (upper - lower) / (2 * step)
            error = relative_error(float(analytic[element]), numeric)
            checked += 1
            if error > worst_error or worst is None:
                worst_error, worst = error, (position, int(element))
    report = GradCheckReport(name, worst_error, worst, checked)
    _LOGGER.debug('%s', report)
    return report
