'''
Stride-1, spatially preserving 2-D convolution via im2col.
'''
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .._errors import ShapeError, ValidationError
from ..pool import COLUMNS


class ConvLayer(object):
    '''
    Convolution parameters.

    :param numpy.ndarray weight: Filters of shape ``(c_out, c_in, F, F)``,
        ``F`` odd.
    :param numpy.ndarray bias: ``c_out`` biases.
    :param int padding: Zero padding; must be ``(F - 1) / 2``.
    '''

    __slots__ = ('weight', 'bias', 'padding', 'stride')

    def __init__(self, weight, bias, padding=None):
        if weight.ndim != 4 or weight.shape[2] != weight.shape[3]:
            raise ShapeError('filters must have shape (c_out, c_in, F, F), got {0}'.format(weight.shape))
        size = weight.shape[2]
        if size % 2 == 0:
            raise ValidationError('filter size must be odd, got {0}'.format(size))
        if bias.shape != (weight.shape[0],):
            raise ShapeError('bias shape {0} does not match {1} filters'.format(bias.shape, weight.shape[0]))
        if padding is None:
            padding = (size - 1) // 2
        if padding != (size - 1) // 2:
            raise ValidationError(
                'padding {0} does not preserve size for F={1}'.format(padding, size)
            )
        self.weight = weight
        self.bias = bias
        self.padding = padding
        self.stride = 1

    @property
    def in_channels(self):
        return self.weight.shape[1]

    @property
    def out_channels(self):
        return self.weight.shape[0]

    @property
    def filter_size(self):
        return self.weight.shape[2]

    def __repr__(self):
        return '<netroute.nn.ConvLayer {0}->{1}, F={2}, P={3}, S={4}>'.format(
            self.in_channels, self.out_channels, self.filter_size, self.padding, self.stride
        )


def _check_input(x, layer):
    if x.ndim != 4:
        raise ShapeError('expected a (n, c, h, w) tensor, got shape {0}'.format(x.shape))
    if x.shape[1] != layer.in_channels:
        raise ShapeError(
            'input has {0} channels, layer expects {1}'.format(x.shape[1], layer.in_channels)
        )


def _im2col(x, size, padding, out):
    '''
    Unfold `x` into `out`, shape ``(n*h*w, c*F*F)``; row ``(i, y, x)`` holds
    the zero-padded window centred on pixel ``(y, x)`` of sample ``i``.
    '''
    n, c, h, w = x.shape
    padded = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    windows = sliding_window_view(padded, (size, size), axis=(2, 3))
    np.copyto(out.reshape(n, h, w, c, size, size), windows.transpose(0, 2, 3, 1, 4, 5))
    return out


def _col2im(cols, shape, size, padding):
    n, c, h, w = shape
    cols = cols.reshape(n, h, w, c, size, size).transpose(0, 3, 4, 5, 1, 2)
    padded = np.zeros((n, c, h + 2 * padding, w + 2 * padding), dtype=cols.dtype)
    for dy in range(size):
        for dx in range(size):
            padded[:, :, dy:dy + h, dx:dx + w] += cols[:, :, dy, dx]
    return padded[:, :, padding:padding + h, padding:padding + w]


def conv2d_forward(x, layer):
    '''
    Convolve `x` with `layer`.

    :param numpy.ndarray x: Input of shape ``(n, c_in, h, w)``.
    :param ConvLayer layer: The filters.
    :return: Output of shape ``(n, c_out, h, w)``.
    :rtype: numpy.ndarray
    '''
    _check_input(x, layer)
    n, c, h, w = x.shape
    size = layer.filter_size
    weight = layer.weight.reshape(layer.out_channels, -1)
    with COLUMNS.buffer((n * h * w, c * size * size), x.dtype) as cols:
        _im2col(x, size, layer.padding, cols)
        out = cols @ weight.T
    out += layer.bias
    return np.ascontiguousarray(out.reshape(n, h, w, -1).transpose(0, 3, 1, 2))


def conv2d_backward(x, layer, grad_out, need_input_grad=True):
    '''
    Gradients of :py:func:`conv2d_forward`.

    :param numpy.ndarray x: The forward input.
    :param ConvLayer layer: The filters.
    :param numpy.ndarray grad_out: Gradient with respect to the output.
    :param bool need_input_grad: Skip the input gradient (returned as
        ``None``) when `x` is data.
    :return: ``(grad_input, grad_weight, grad_bias)``
    '''
    _check_input(x, layer)
    n, c, h, w = x.shape
    if grad_out.shape != (n, layer.out_channels, h, w):
        raise ShapeError(
            'output gradient has shape {0}, expected {1}'.format(
                grad_out.shape, (n, layer.out_channels, h, w)
            )
        )
    size = layer.filter_size
    weight = layer.weight.reshape(layer.out_channels, -1)
    grad = grad_out.transpose(0, 2, 3, 1).reshape(-1, layer.out_channels)

    with COLUMNS.buffer((n * h * w, c * size * size), x.dtype) as cols:
        _im2col(x, size, layer.padding, cols)
        grad_weight = (grad.T @ cols).reshape(layer.weight.shape)
    grad_bias = grad.sum(axis=0)

    grad_input = None
    if need_input_grad:
        grad_input = np.ascontiguousarray(_col2im(grad @ weight, x.shape, size, layer.padding))
    return grad_input, grad_weight, grad_bias
