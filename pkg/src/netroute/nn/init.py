'''
Default parameter initialization.
'''
import numpy as np


def fan_in_bound(in_channels, size):
    return 1.0 / np.sqrt(in_channels * size * size)


def init_weights(shapes, seed, dtype=np.float32):
    '''
    Draw convolution filters and biases uniformly from ``(-b, b)`` with
    ``b = 1 / sqrt(c_in * F * F)``.

    :param shapes: ``(c_out, c_in, F)`` per stage, in stage order.
    :param int seed: Seed; the same seed gives the same parameters.
    :return: A list of ``(weight, bias)`` pairs.
    '''
    rng = np.random.default_rng(seed)
    params = []
    for out_channels, in_channels, size in shapes:
        bound = fan_in_bound(in_channels, size)
        weight = rng.uniform(-bound, bound, size=(out_channels, in_channels, size, size))
        bias = rng.uniform(-bound, bound, size=out_channels)
        params.append((weight.astype(dtype), bias.astype(dtype)))
    return params
