'''
Class-weighted softmax cross-entropy and the L2 weight penalty.
'''
from collections import namedtuple

import numpy as np
from scipy.special import log_softmax

from .._errors import ShapeError, ValidationError


class LossConfig(namedtuple('LossConfig', ['k0', 'k1', 'l2'])):
    '''
    Loss weights.

    :param float k0: Weight of background (``y = 0``) terms.
    :param float k1: Weight of foreground (``y = 1``) terms.
    :param float l2: L2 regularization coefficient (lambda).
    '''
    __slots__ = ()

    def __new__(cls, k0=1.0, k1=3.0, l2=1e-5):
        k0, k1, l2 = float(k0), float(k1), float(l2)
        if k0 <= 0 or k1 <= 0:
            raise ValidationError('class weights must be positive, got ({0}, {1})'.format(k0, k1))
        if l2 < 0:
            raise ValidationError('L2 coefficient must be >= 0, got {0}'.format(l2))
        return super(LossConfig, cls).__new__(cls, k0, k1, l2)

    @property
    def class_weights(self):
        return (self.k0, self.k1)


def weighted_xent(scores, labels, config=None):
    '''
    Mean class-weighted cross-entropy of a score matrix.

    ``loss = sum_i k[y_i] * -log softmax(S_i)[y_i] / M`` over the ``M`` rows;
    the denominator is the row count, not the sum of weights.

    :param numpy.ndarray scores: Shape ``(M, 2)``.
    :param numpy.ndarray labels: ``M`` class indices in ``{0, 1}``.
    :param LossConfig config: The class weights (`l2` is ignored here).
    :return: ``(loss, grad_scores)`` with `loss` a Python float.
    '''
    config = config or LossConfig()
    weights = np.asarray(config.class_weights, dtype=scores.dtype)
    if scores.ndim != 2 or scores.shape[1] != len(weights):
        raise ShapeError('scores must have shape (M, {0}), got {1}'.format(len(weights), scores.shape))
    labels = np.asarray(labels).reshape(-1)
    if labels.shape[0] != scores.shape[0]:
        raise ShapeError('{0} labels for {1} score rows'.format(labels.shape[0], scores.shape[0]))
    if labels.size and (labels.min() < 0 or labels.max() > len(weights) - 1 or not np.all(labels == np.round(labels))):
        raise ValidationError('labels must be integers in {{0, {0}}}'.format(len(weights) - 1))
    labels = labels.astype(np.intp)

    rows = scores.shape[0]
    log_probs = log_softmax(scores, axis=1)
    index = np.arange(rows)
    row_weights = weights[labels]

    loss = float(np.sum(row_weights * -log_probs[index, labels], dtype=np.float64) / rows)

    grad = np.exp(log_probs)
    grad[index, labels] -= 1
    grad *= (row_weights / rows)[:, np.newaxis]
    return loss, grad


def l2_penalty(weights, coefficient):
    '''
    ``coefficient * sum(w ** 2)`` over every array in `weights`.

    :param weights: Convolution filter arrays.
    :param float coefficient: Lambda, >= 0.
    :return: ``(penalty, grads)`` with one ``2 * lambda * w`` per array.
    '''
    if coefficient < 0:
        raise ValidationError('L2 coefficient must be >= 0, got {0}'.format(coefficient))
    penalty = coefficient * sum(float(np.sum(w * w, dtype=np.float64)) for w in weights)
    grads = [w * w.dtype.type(2 * coefficient) for w in weights]
    return penalty, grads
