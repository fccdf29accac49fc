'''
Gradient-check suite over every differentiable operation and a small
end-to-end network, run in float64.
'''
import logging

import numpy as np

from .fcn import FcnConfig, build, loss_and_gradients
from .layout import GridDims
from .nn import (
    DEFAULT_TOLERANCE,
    TRAIN,
    BatchNormLayer,
    ConvLayer,
    LossConfig,
    batchnorm,
    batchnorm_backward,
    conv2d_backward,
    conv2d_forward,
    grad_check,
    l2_penalty,
    leaky_relu,
    leaky_relu_backward,
    weighted_xent,
)

_LOGGER = logging.getLogger(__name__)

# Elements compared per parameter block of the end-to-end network.
NETWORK_CHECKS = 20


def check_conv(rng, seed=0):
    x = rng.standard_normal((2, 3, 8, 8))
    layer = ConvLayer(rng.standard_normal((4, 3, 3, 3)) * 0.3, rng.standard_normal(4))
    upstream = rng.standard_normal((2, 4, 8, 8))

    def func(x, weight, bias): # pylint: disable=unused-argument
        return float(np.sum(conv2d_forward(x, layer) * upstream))

    grad_x, grad_w, grad_b = conv2d_backward(x, layer, upstream)
    return grad_check(func, [x, layer.weight, layer.bias], [grad_x, grad_w, grad_b], 'conv2d', seed=seed)


def check_batchnorm(rng, seed=0):
    x = rng.standard_normal((4, 3, 5, 5)) * 2.0 + 0.5
    layer = BatchNormLayer(3, dtype=np.float64)
    layer.gamma[...] = rng.uniform(0.5, 1.5, 3)
    layer.beta[...] = rng.standard_normal(3)
    upstream = rng.standard_normal(x.shape)

    def func(x, gamma, beta): # pylint: disable=unused-argument
        return float(np.sum(batchnorm(x, layer, TRAIN)[0] * upstream))

    _, cache = batchnorm(x, layer, TRAIN)
    grads = batchnorm_backward(upstream, layer, cache)
    return grad_check(func, [x, layer.gamma, layer.beta], list(grads), 'batchnorm', seed=seed)


def check_leaky_relu(rng, seed=0):
    x = rng.standard_normal((2, 3, 4, 4))
    # Keep samples away from the kink.
    x[np.abs(x) < 0.05] += 0.1
    upstream = rng.standard_normal(x.shape)

    def func(x):
        return float(np.sum(leaky_relu(x) * upstream))

    return grad_check(func, [x], [leaky_relu_backward(x, upstream)], 'leaky_relu', seed=seed)


def check_xent(rng, seed=0):
    scores = rng.standard_normal((50, 2)) * 2.0
    labels = rng.integers(0, 2, 50)
    config = LossConfig()

    def func(scores):
        return weighted_xent(scores, labels, config)[0]

    return grad_check(func, [scores], [weighted_xent(scores, labels, config)[1]], 'weighted_xent', seed=seed)


def check_l2(rng, seed=0):
    weights = [rng.standard_normal((4, 3, 3, 3)), rng.standard_normal((2, 4, 1, 1))]
    coefficient = 1e-2

    def func(*weights):
        return l2_penalty(weights, coefficient)[0]

    return grad_check(func, weights, l2_penalty(weights, coefficient)[1], 'l2_penalty', seed=seed)


def check_network(rng, seed=0):
    '''A 3-stage, F1=5 network on one 8x8 sample, against the total loss.'''
    config = FcnConfig(n_stages=3, first_filter=5, dims=GridDims(8, 8))
    model = build(config, seed=seed, dtype=np.float64)
    data = np.zeros((1, 1, 8, 8))
    for y, x in ((1, 2), (6, 5), (3, 7)):
        data[0, 0, y, x] = 1.0
    labels = (rng.random((1, 8, 8, 8)) < 0.3).astype(np.float64)

    def func(*params): # pylint: disable=unused-argument
        return loss_and_gradients(model, data, labels)[0]

    _, grads = loss_and_gradients(model, data, labels)
    # Biases feeding a batch norm have an identically zero gradient.
    last_bias = 'stage{0:02d}.bias'.format(config.n_stages)
    blocks = [
        (param, grad)
        for name, param, grad in zip(model.parameter_names(), model.parameters(), grads)
        if not name.endswith('.bias') or name == last_bias
    ]
    return grad_check(
        func,
        [param for param, _ in blocks],
        [grad for _, grad in blocks],
        'network',
        max_checks=NETWORK_CHECKS,
        seed=seed,
    )


CHECKS = (
    check_conv,
    check_batchnorm,
    check_leaky_relu,
    check_xent,
    check_l2,
    check_network,
)


def run_suite(seed=0, tolerance=DEFAULT_TOLERANCE):
    '''
    Run every check.

    :return: ``[(report, passed)]`` in suite order.
    :rtype: list
    '''
    results = []
    for check in CHECKS:
        report = check(np.random.default_rng([seed, len(results)]), seed)
        passed = report.passed(tolerance)
        (_LOGGER.info if passed else _LOGGER.warning)('%s %s', report, 'ok' if passed else 'FAILED')
        results.append((report, passed))
    return results
