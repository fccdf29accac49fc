'''
Per-channel batch normalization over ``(n, h, w)``.
'''
from collections import namedtuple

import numpy as np

from .._errors import ShapeError, ValidationError

TRAIN = 'train'
EVAL = 'eval'

BatchNormCache = namedtuple('BatchNormCache', ['normalized', 'inv_std', 'training'])


class BatchNormLayer(object):
    '''
    Batch normalization parameters and running statistics.

    :param int channels: Number of channels.
    :param float momentum: Weight of the current batch in the running
        statistics update.
    :param float epsilon: Variance guard; must be positive.
    '''

    __slots__ = ('gamma', 'beta', 'running_mean', 'running_var', 'momentum', 'epsilon')

    def __init__(self, channels, momentum=0.1, epsilon=1e-5, dtype=np.float32):
        if epsilon <= 0:
            raise ValidationError('epsilon must be positive, got {0}'.format(epsilon))
        if not 0 <= momentum <= 1:
            raise ValidationError('momentum must be in [0, 1], got {0}'.format(momentum))
        self.gamma = np.ones(channels, dtype=dtype)
        self.beta = np.zeros(channels, dtype=dtype)
        self.running_mean = np.zeros(channels, dtype=dtype)
        self.running_var = np.ones(channels, dtype=dtype)
        self.momentum = momentum
        self.epsilon = epsilon

    @property
    def channels(self):
        return self.gamma.shape[0]


def _channel_view(values):
    return values.reshape(1, -1, 1, 1)


def batchnorm(x, layer, mode=TRAIN):
    '''
    Normalize `x` per channel.

    In ``'train'`` mode the batch mean and biased variance are used and the
    running statistics are updated as
    ``running = (1 - momentum) * running + momentum * batch``. In ``'eval'``
    mode the running statistics are used.

    :param numpy.ndarray x: Input of shape ``(n, c, h, w)``.
    :param BatchNormLayer layer: The layer.
    :param str mode: ``'train'`` or ``'eval'``.
    :return: ``(output, cache)``; pass `cache` to :py:func:`batchnorm_backward`.
    '''
    if x.ndim != 4 or x.shape[1] != layer.channels:
        raise ShapeError('expected (n, {0}, h, w) input, got {1}'.format(layer.channels, x.shape))
    if mode == TRAIN:
        count = x.shape[0] * x.shape[2] * x.shape[3]
        if count < 2:
            raise ValidationError('train-mode batch norm needs >= 2 values per channel, got {0}'.format(count))
        mean = x.mean(axis=(0, 2, 3))
        var = x.var(axis=(0, 2, 3))
        momentum = layer.momentum
        layer.running_mean *= 1 - momentum
        layer.running_mean += momentum * mean.astype(layer.running_mean.dtype)
        layer.running_var *= 1 - momentum
        layer.running_var += momentum * var.astype(layer.running_var.dtype)
    elif mode == EVAL:
        mean = layer.running_mean.astype(x.dtype)
        var = layer.running_var.astype(x.dtype)
    else:
        raise ValidationError('mode must be {0!r} or {1!r}, got {2!r}'.format(TRAIN, EVAL, mode))

    inv_std = (1.0 / np.sqrt(var + layer.epsilon)).astype(x.dtype)
    normalized = (x - _channel_view(mean)) * _channel_view(inv_std)
    out = normalized * _channel_view(layer.gamma.astype(x.dtype)) + _channel_view(layer.beta.astype(x.dtype))
    return out, BatchNormCache(normalized, inv_std, mode == TRAIN)


def batchnorm_backward(grad_out, layer, cache):
    '''
    Gradients of :py:func:`batchnorm`.

    :return: ``(grad_input, grad_gamma, grad_beta)``
    '''
    normalized, inv_std, training = cache
    if grad_out.shape != normalized.shape:
        raise ShapeError('gradient shape {0} does not match {1}'.format(grad_out.shape, normalized.shape))
    grad_beta = grad_out.sum(axis=(0, 2, 3))
    grad_gamma = (grad_out * normalized).sum(axis=(0, 2, 3))
    grad_normalized = grad_out * _channel_view(layer.gamma.astype(grad_out.dtype))
    if training:
        count = grad_out.shape[0] * grad_out.shape[2] * grad_out.shape[3]
        grad_input = _channel_view(inv_std / count) * (
            count * grad_normalized
            - _channel_view(grad_normalized.sum(axis=(0, 2, 3)))
            - normalized * _channel_view((grad_normalized * normalized).sum(axis=(0, 2, 3)))
        )
    else:
        grad_input = grad_normalized * _channel_view(inv_std)
    return grad_input, grad_gamma, grad_beta
