'''
Confusion counts and precision/recall/accuracy/F1 over per-pixel per-layer
binary decisions.
'''
from collections import namedtuple

import numpy as np

from ._errors import ShapeError, ValidationError


class ConfusionCounts(namedtuple('ConfusionCounts', ['tp', 'fp', 'fn', 'tn'])):
    '''
    True/false positive/negative totals. Counts add element-wise:
    ``a + b`` merges two shards.
    '''
    __slots__ = ()

    def __new__(cls, tp=0, fp=0, fn=0, tn=0):
        return super(ConfusionCounts, cls).__new__(cls, int(tp), int(fp), int(fn), int(tn))

    def __add__(self, other):
        if not isinstance(other, ConfusionCounts):
            return NotImplemented
        return ConfusionCounts(*(mine + theirs for mine, theirs in zip(self, other)))

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


Summary = namedtuple('Summary', ['precision', 'recall', 'accuracy', 'f1'])


def _binary(values, name):
    values = np.asarray(values)
    if values.size and not np.isin(values, (0, 1)).all():
        raise ValidationError('{0} must be binary'.format(name))
    return values.astype(bool)


def accumulate(pred, truth):
    '''
    Count decisions of a predicted against a true binary batch.

    :param pred: Predicted values, any shape.
    :param truth: True values, same shape as `pred`.
    :rtype: ConfusionCounts
    '''
    pred = _binary(pred, 'predictions')
    truth = _binary(truth, 'ground truth')
    if pred.shape != truth.shape:
        raise ShapeError('prediction shape {0} does not match truth {1}'.format(pred.shape, truth.shape))
    tp = np.count_nonzero(pred & truth)
    fp = np.count_nonzero(pred & ~truth)
    fn = np.count_nonzero(~pred & truth)
    return ConfusionCounts(tp, fp, fn, pred.size - tp - fp - fn)


def accumulate_by(pred, truth, keys):
    '''
    Per-sample counts merged by key, e.g. the pin count of each sample.

    :param pred: Predicted batch, samples along axis 0.
    :param truth: True batch.
    :param keys: One hashable key per sample.
    :return: ``{key: ConfusionCounts}``
    :rtype: dict
    '''
    if len(keys) != len(pred):
        raise ShapeError('{0} keys for {1} samples'.format(len(keys), len(pred)))
    counts = {}
    for key, sample_pred, sample_truth in zip(keys, pred, truth):
        counts[key] = counts.get(key, ConfusionCounts()) + accumulate(sample_pred, sample_truth)
    return counts


def summarize(counts):
    '''
    Precision, recall, accuracy and F1::

        precision = tp / (tp + fp)
        recall = tp / (tp + fn)
        accuracy = (tp + tn) / (tp + tn + fp + fn)
        f1 = 2 * precision * recall / (precision + recall)

    A zero denominator yields 0, except that with no positives at all
    (``tp = fp = fn = 0``) precision, recall and F1 are 1.

    :param ConfusionCounts counts: The counts.
    :rtype: Summary
    '''
    tp, fp, fn, tn = counts
    if tp == fp == fn == 0:
        return Summary(1.0, 1.0, 1.0, 1.0)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    accuracy = (tp + tn) / counts.total
    f1 = 2 * (precision * recall) / (precision + recall) if precision + recall else 0.0
    return Summary(precision, recall, accuracy, f1)
