'''
Adam with bias correction.
'''
import numpy as np

from .._errors import NumericalError, ShapeError


class AdamState(object):
    '''
    Optimizer state for a list of parameter blocks.

    :param params: The parameter arrays the moments track.
    :param float lr: Learning rate.
    '''

    __slots__ = ('lr', 'beta1', 'beta2', 'epsilon', 't', 'm', 'v')

    def __init__(self, params, lr=5e-5, beta1=0.9, beta2=0.999, epsilon=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.t = 0
        self.m = [np.zeros_like(param) for param in params]
        self.v = [np.zeros_like(param) for param in params]


def adam_step(params, grads, state, names=None):
    '''
    Apply one Adam update to `params` in place.

    :param list params: Parameter arrays, updated in place.
    :param list grads: Matching gradients.
    :param AdamState state: Moments and step count; ``t`` is incremented
        before the update.
    :param list names: Block names used in error messages.
    :raises netroute.NumericalError: If a gradient is not finite; no
        parameter is modified.
    '''
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeError('{0} parameters, {1} gradients, {2} moment blocks'.format(
            len(params), len(grads), len(state.m)
        ))
    names = names or ['block{0}'.format(index) for index in range(len(params))]
    for name, param, grad in zip(names, params, grads):
        if grad.shape != param.shape:
            raise ShapeError('gradient for {0} has shape {1}, expected {2}'.format(name, grad.shape, param.shape))
        if not np.all(np.isfinite(grad)):
            raise NumericalError('non-finite gradient in {0}'.format(name), block=name)

    state.t += 1
    beta1, beta2 = state.beta1, state.beta2
    correction1 = 1.0 - beta1 ** state.t
    correction2 = 1.0 - beta2 ** state.t
    for param, grad, m, v in zip(params, grads, state.m, state.v):
        m *= beta1
        m += (1.0 - beta1) * grad
        v *= beta2
        v += (1.0 - beta2) * (grad * grad)
        m_hat = m / correction1
        v_hat = v / correction2
        param -= (state.lr * m_hat / (np.sqrt(v_hat) + state.epsilon)).astype(param.dtype)
