'''
The routing network: a stack of spatially preserving convolution stages
that maps a pin plane ``(n, 1, H, W)`` to per-layer class scores
``(n, 16, H, W)``, and the score comparator that turns scores into 8 binary
layout planes.

Score channels ``2i`` and ``2i + 1`` hold the background and foreground
scores of layer ``LayerId(i)``.
'''
from collections import namedtuple
import csv
import logging
import math
import os

import numpy as np

from ._errors import NumericalError, ShapeError, ValidationError
from .dataset import batches, pins_from_plane
from .drc import run_drc
from .layout import LAYER_COUNT, GridDims, LayoutGrid
from .metrics import ConfusionCounts, accumulate, accumulate_by, summarize
from .nn import (
    EVAL,
    TRAIN,
    AdamState,
    BatchNormLayer,
    ConvLayer,
    LossConfig,
    adam_step,
    batchnorm,
    batchnorm_backward,
    conv2d_backward,
    conv2d_forward,
    init_weights,
    l2_penalty,
    leaky_relu,
    leaky_relu_backward,
    weighted_xent,
)

_LOGGER = logging.getLogger(__name__)

CLASSES = 2

# Mini-batch / learning-rate reference pair for the linear scaling rule.
REFERENCE_BATCH = 10
REFERENCE_LR = 5e-5


def _check_filter(name, size):
    if size < 1 or size % 2 == 0:
        raise ValidationError('{0} must be a positive odd size, got {1}'.format(name, size))


def min_stages(first_filter, inner_filter, extent):
    '''
    The fewest stages whose receptive field spans `extent` pixels: the
    smallest ``n`` with ``first + (n - 1) * (inner - 1) >= extent - 1``.
    With all 3x3 stages on a 32 pixel grid this is 15.

    :rtype: int
    '''
    _check_filter('first filter', first_filter)
    _check_filter('inner filter', inner_filter)
    missing = (extent - 1) - first_filter
    if missing <= 0:
        return 1
    if inner_filter == 1:
        raise ValidationError('1x1 inner stages cannot grow a {0}x{0} receptive field'.format(first_filter))
    return 1 + int(math.ceil(missing / float(inner_filter - 1)))


class FcnConfig(namedtuple('FcnConfig', [
        'n_stages',
        'first_filter',
        'inner_filter',
        'channels',
        'layers',
        'classes',
        'dims',
        'leaky_slope',
        'loss',
        'bn_momentum',
        'bn_epsilon',
])):
    '''
    Network architecture and loss settings.

    :raises netroute.ValidationError: If ``channels != layers * classes``, a
        filter size is even, or the stages cannot span the grid (see
        :py:func:`min_stages`).
    '''
    __slots__ = ()

    def __new__( # pylint: disable=too-many-arguments
            cls,
            n_stages=15,
            first_filter=33,
            inner_filter=3,
            channels=16,
            layers=LAYER_COUNT,
            classes=CLASSES,
            dims=None,
            leaky_slope=0.01,
            loss=None,
            bn_momentum=0.1,
            bn_epsilon=1e-5,
    ):
        dims = dims or GridDims()
        loss = loss or LossConfig()
        if layers != LAYER_COUNT or classes != CLASSES:
            raise ValidationError(
                'the network predicts {0} layers x {1} classes, got {2} x {3}'.format(
                    LAYER_COUNT, CLASSES, layers, classes
                )
            )
        if channels != layers * classes:
            raise ValidationError('channels must equal layers * classes = {0}, got {1}'.format(layers * classes, channels))
        if n_stages < 1:
            raise ValidationError('a network needs at least one stage')
        required = min_stages(first_filter, inner_filter, max(dims))
        if n_stages < required:
            raise ValidationError(
                '{0} stages with F1={1}, F={2} cannot span a {3}x{4} grid; at least {5} are needed'.format(
                    n_stages, first_filter, inner_filter, dims.width, dims.height, required
                )
            )
        if not 0 < leaky_slope < 1:
            raise ValidationError('leaky slope must be in (0, 1), got {0}'.format(leaky_slope))
        return super(FcnConfig, cls).__new__(
            cls, int(n_stages), int(first_filter), int(inner_filter), int(channels), int(layers),
            int(classes), dims, float(leaky_slope), loss, float(bn_momentum), float(bn_epsilon),
        )

    @property
    def receptive_field(self):
        return self.first_filter + (self.n_stages - 1) * (self.inner_filter - 1)

    def stage_shapes(self):
        '''``(c_out, c_in, F)`` of every stage.'''
        return [(self.channels, 1, self.first_filter)] + [
            (self.channels, self.channels, self.inner_filter) for _ in range(self.n_stages - 1)
        ]


class FcnModel(object):
    '''
    Network parameters, batch-norm statistics and optimizer state.

    Stages ``1 .. n-1`` are convolution, batch norm and leaky ReLU; the last
    stage is a bare convolution producing scores.

    :ivar FcnConfig config: The architecture.
    :ivar list convs: One :py:class:`~netroute.nn.ConvLayer` per stage.
    :ivar list norms: One :py:class:`~netroute.nn.BatchNormLayer` per stage
        but the last.
    :ivar AdamState adam: Optimizer state over :py:meth:`parameters`.
    :ivar int epoch: Completed training epochs.
    '''

    __slots__ = ('config', 'convs', 'norms', 'adam', 'epoch')

    def __init__(self, config, convs, norms, adam=None, epoch=0):
        self.config = config
        self.convs = convs
        self.norms = norms
        self.adam = adam if adam is not None else AdamState(self.parameters())
        self.epoch = epoch

    @property
    def dtype(self):
        return self.convs[0].weight.dtype

    def parameters(self):
        '''Trainable arrays in declared order: per stage weight, bias, then gamma, beta.'''
        params = []
        for index, conv in enumerate(self.convs):
            params += [conv.weight, conv.bias]
            if index < len(self.norms):
                params += [self.norms[index].gamma, self.norms[index].beta]
        return params

    def parameter_names(self):
        names = []
        for index in range(len(self.convs)):
            prefix = 'stage{0:02d}.'.format(index + 1)
            names += [prefix + 'weight', prefix + 'bias']
            if index < len(self.norms):
                names += [prefix + 'gamma', prefix + 'beta']
        return names

    def conv_weights(self):
        return [conv.weight for conv in self.convs]

    def astype(self, dtype):
        '''A deep copy with every array cast to `dtype`.'''
        convs = [
            ConvLayer(conv.weight.astype(dtype), conv.bias.astype(dtype), conv.padding)
            for conv in self.convs
        ]
        norms = []
        for norm in self.norms:
            clone = BatchNormLayer(norm.channels, norm.momentum, norm.epsilon, dtype)
            clone.gamma[...] = norm.gamma
            clone.beta[...] = norm.beta
            clone.running_mean[...] = norm.running_mean
            clone.running_var[...] = norm.running_var
            norms.append(clone)
        model = FcnModel(self.config, convs, norms, epoch=self.epoch)
        model.adam.lr = self.adam.lr
        model.adam.beta1, model.adam.beta2, model.adam.epsilon = self.adam.beta1, self.adam.beta2, self.adam.epsilon
        model.adam.t = self.adam.t
        for target, source in zip(model.adam.m + model.adam.v, self.adam.m + self.adam.v):
            target[...] = source
        return model

    def copy(self):
        return self.astype(self.dtype)

    def __repr__(self):
        return '<netroute.FcnModel {0} stages, F1={1}, epoch {2}>'.format(
            self.config.n_stages, self.config.first_filter, self.epoch
        )


def build(config=None, seed=0, dtype=np.float32, lr=REFERENCE_LR):
    '''
    Create a freshly initialized network.

    :param FcnConfig config: The architecture; defaults to 15 stages with a
        33x33 first stage.
    :param int seed: Initialization seed.
    :rtype: FcnModel
    '''
    config = config or FcnConfig()
    convs = [
        ConvLayer(weight, bias)
        for weight, bias in init_weights(config.stage_shapes(), seed, dtype)
    ]
    norms = [
        BatchNormLayer(config.channels, config.bn_momentum, config.bn_epsilon, dtype)
        for _ in range(config.n_stages - 1)
    ]
    model = FcnModel(config, convs, norms)
    model.adam.lr = lr
    return model


_Stage = namedtuple('_Stage', ['input', 'bn_cache', 'pre_activation'])


def _check_data(model, data):
    dims = model.config.dims
    expected = (1, dims.height, dims.width)
    if data.ndim != 4 or data.shape[1:] != expected:
        raise ShapeError('network input must have shape (n, {0}, {1}, {2}), got {3}'.format(
            expected[0], expected[1], expected[2], data.shape
        ))


def _forward(model, data, mode):
    _check_data(model, data)
    slope = model.config.leaky_slope
    x = np.ascontiguousarray(data, dtype=model.dtype)
    tape = []
    for index, conv in enumerate(model.convs):
        z = conv2d_forward(x, conv)
        if index < len(model.norms):
            y, cache = batchnorm(z, model.norms[index], mode)
            tape.append(_Stage(x, cache, y))
            x = leaky_relu(y, slope)
        else:
            tape.append(_Stage(x, None, None))
            x = z
    return x, tape


def _backward(model, tape, grad_scores):
    slope = model.config.leaky_slope
    grads = []
    grad = grad_scores
    for index in reversed(range(len(model.convs))):
        stage = tape[index]
        norm_grads = []
        if index < len(model.norms):
            grad = leaky_relu_backward(stage.pre_activation, grad, slope)
            grad, grad_gamma, grad_beta = batchnorm_backward(grad, model.norms[index], stage.bn_cache)
            norm_grads = [grad_gamma, grad_beta]
        grad, grad_weight, grad_bias = conv2d_backward(
            stage.input, model.convs[index], grad, need_input_grad=index > 0
        )
        grads = [grad_weight, grad_bias] + norm_grads + grads
    return grads


def forward(model, data, mode=EVAL):
    '''
    Compute scores for a batch of pin planes.

    :param FcnModel model: The network.
    :param numpy.ndarray data: Shape ``(n, 1, H, W)``, binary values.
    :param str mode: ``'train'`` (batch statistics, updates running
        statistics) or ``'eval'`` (running statistics).
    :return: Scores of shape ``(n, 16, H, W)``.
    '''
    return _forward(model, data, mode)[0]


def score_comparator(scores):
    '''
    Pick the higher-scoring class per layer and pixel; ties are background.

    :param numpy.ndarray scores: Shape ``(n, 16, H, W)``.
    :return: Binary layouts of shape ``(n, 8, H, W)``, dtype uint8.
    '''
    if scores.ndim != 4 or scores.shape[1] != LAYER_COUNT * CLASSES:
        raise ShapeError('scores must have {0} channels, got shape {1}'.format(LAYER_COUNT * CLASSES, scores.shape))
    return (scores[:, 1::2] > scores[:, 0::2]).astype(np.uint8)


def predict(model, data):
    '''Eval-mode forward pass followed by the score comparator.'''
    return score_comparator(forward(model, data, EVAL))


def scores_to_matrix(scores):
    '''Reshape ``(n, 2a, h, w)`` scores to an ``(n*h*w*a, 2)`` matrix.'''
    n, channels, h, w = scores.shape
    layers = channels // CLASSES
    return scores.reshape(n, layers, CLASSES, h, w).transpose(0, 3, 4, 1, 2).reshape(-1, CLASSES)


def matrix_to_scores(matrix, shape):
    '''Inverse of :py:func:`scores_to_matrix`.'''
    n, channels, h, w = shape
    layers = channels // CLASSES
    return np.ascontiguousarray(
        matrix.reshape(n, h, w, layers, CLASSES).transpose(0, 3, 4, 1, 2).reshape(shape)
    )


def labels_to_vector(labels):
    '''Reshape ``(n, a, h, w)`` labels to a length ``n*h*w*a`` vector.'''
    return labels.transpose(0, 2, 3, 1).reshape(-1)


def loss_and_gradients(model, data, labels):
    '''
    Train-mode loss (weighted cross-entropy plus L2) and its gradient with
    respect to every parameter in :py:meth:`FcnModel.parameters` order.

    :return: ``(loss, grads)``
    '''
    scores, tape = _forward(model, data, TRAIN)
    if labels.shape != (scores.shape[0], LAYER_COUNT) + scores.shape[2:]:
        raise ShapeError('labels have shape {0}, expected {1}'.format(
            labels.shape, (scores.shape[0], LAYER_COUNT) + scores.shape[2:]
        ))
    config = model.config.loss
    matrix = scores_to_matrix(scores)
    data_loss, grad_matrix = weighted_xent(matrix, labels_to_vector(labels), config)
    penalty, penalty_grads = l2_penalty(model.conv_weights(), config.l2)
    grads = _backward(model, tape, matrix_to_scores(grad_matrix, scores.shape))
    for stage, penalty_grad in enumerate(penalty_grads):
        grads[_weight_index(model, stage)] += penalty_grad
    return data_loss + penalty, grads


def _weight_index(model, stage):
    return 4 * min(stage, len(model.norms)) + 2 * max(0, stage - len(model.norms))


def train_step(model, data, labels, lr=None):
    '''
    One optimization step on a mini-batch; `model` is updated in place.

    :param numpy.ndarray data: Shape ``(n, 1, H, W)``.
    :param numpy.ndarray labels: Shape ``(n, 8, H, W)``, binary.
    :param float lr: Learning rate; keeps the optimizer's when ``None``.
    :return: The total loss before the update.
    :rtype: float
    :raises netroute.NumericalError: If the loss is not finite; the model is
        left unchanged.
    '''
    loss, grads = loss_and_gradients(model, data, labels)
    if not math.isfinite(loss):
        raise NumericalError('non-finite loss {0} at step {1}'.format(loss, model.adam.t + 1))
    if lr is not None:
        model.adam.lr = lr
    adam_step(model.parameters(), grads, model.adam, model.parameter_names())
    return loss


def scaled_learning_rate(batch_size, base_batch=REFERENCE_BATCH, base_lr=REFERENCE_LR):
    '''
    Linear scaling rule: grow the learning rate in proportion to the
    mini-batch size. ``scaled_learning_rate(100)`` is ``5e-4``.
    '''
    if batch_size < 1 or base_batch < 1:
        raise ValidationError('batch sizes must be >= 1')
    return base_lr * batch_size / float(base_batch)


class Evaluation(namedtuple('Evaluation', ['loss', 'precision', 'recall', 'accuracy', 'f1', 'counts', 'by_pins', 'drc_pass_rate'])):
    '''
    Metrics over a whole dataset, from counts pooled across every sample,
    layer and pixel.

    :ivar dict by_pins: ``{n_pins: ConfusionCounts}`` when requested.
    :ivar float drc_pass_rate: Fraction of predicted layouts passing
        :py:func:`~netroute.drc.run_drc`, when requested.
    '''
    __slots__ = ()


def evaluate(model, dataset, batch_size=20, by_pin_count=False, drc=False):
    '''
    Score `model` on every sample of `dataset` in eval mode.

    :param dataset: A :py:class:`~netroute.dataset.DatasetReader` or
        :py:class:`~netroute.dataset.InMemoryDataset`.
    :param bool by_pin_count: Also break counts down by pin count.
    :param bool drc: Also design-rule check every prediction.
    :rtype: Evaluation
    '''
    total = len(dataset)
    if total == 0:
        raise ValidationError('cannot evaluate on an empty dataset')
    config = model.config.loss
    counts = ConfusionCounts()
    by_pins = {} if by_pin_count else None
    loss_sum, rows, passed = 0.0, 0, 0
    for start in range(0, total, batch_size):
        indices = np.arange(start, min(start + batch_size, total))
        data = dataset.data(indices)
        truth = dataset.labels(indices)
        scores = forward(model, data.astype(model.dtype), EVAL)
        matrix = scores_to_matrix(scores)
        batch_loss, _ = weighted_xent(matrix, labels_to_vector(truth), config)
        loss_sum += batch_loss * matrix.shape[0]
        rows += matrix.shape[0]

        pred = score_comparator(scores)
        counts += accumulate(pred, truth)
        if by_pins is not None or drc:
            pins = [pins_from_plane(plane) for plane in data]
        if by_pins is not None:
            for key, value in accumulate_by(pred, truth, [len(net) for net in pins]).items():
                by_pins[key] = by_pins.get(key, ConfusionCounts()) + value
        if drc:
            passed += sum(run_drc(LayoutGrid(grid), net).passed for grid, net in zip(pred, pins))

    penalty, _ = l2_penalty(model.conv_weights(), config.l2)
    summary = summarize(counts)
    return Evaluation(
        loss_sum / rows + penalty,
        summary.precision,
        summary.recall,
        summary.accuracy,
        summary.f1,
        counts,
        by_pins,
        passed / float(total) if drc else None,
    )


MetricsRow = namedtuple('MetricsRow', ['epoch', 'split', 'loss', 'precision', 'recall', 'accuracy', 'f1'])

METRICS_HEADER = MetricsRow._fields


def metrics_row(epoch, split, evaluation):
    return MetricsRow(
        epoch, split, evaluation.loss, evaluation.precision, evaluation.recall,
        evaluation.accuracy, evaluation.f1,
    )


def format_metrics_row(row):
    return [str(row.epoch), row.split] + ['{0:.6f}'.format(value) for value in row[2:]]


def checkpoint_path(out_dir, epoch):
    return os.path.join(out_dir, 'epoch-{0:03d}.ckpt'.format(epoch))


def fit( # pylint: disable=too-many-arguments,too-many-locals
        model,
        train,
        epochs,
        batch_size=REFERENCE_BATCH,
        lr=REFERENCE_LR,
        seed=0,
        val=None,
        out_dir=None,
        eval_batch=20,
):
    '''
    Train for `epochs` epochs after ``model.epoch``.

    Epoch ``e`` visits `train` in the order fixed by ``(seed, e)``, so a run
    resumed from a checkpoint continues exactly as an uninterrupted one.
    After each epoch the model is evaluated on `train` (and `val`). With
    `out_dir`, a checkpoint ``epoch-NNN.ckpt`` is saved and the metrics are
    appended to ``metrics.csv``.

    :return: The :py:class:`MetricsRow` records of this run.
    :rtype: list
    '''
    from ._checkpoint import save_checkpoint # pylint: disable=import-outside-toplevel

    rows = []
    csv_path = None
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        csv_path = os.path.join(out_dir, 'metrics.csv')
        if model.epoch == 0 or not os.path.exists(csv_path):
            with open(csv_path, 'w', newline='') as fp:
                csv.writer(fp, lineterminator='\n').writerow(METRICS_HEADER)

    first = model.epoch + 1
    for epoch in range(first, first + epochs):
        steps = 0
        for data, labels in batches(train, batch_size, (seed, epoch)):
            train_step(model, data, labels, lr)
            steps += 1
        model.epoch = epoch

        epoch_rows = [metrics_row(epoch, 'train', evaluate(model, train, eval_batch))]
        if val is not None:
            epoch_rows.append(metrics_row(epoch, 'val', evaluate(model, val, eval_batch)))
        for row in epoch_rows:
            _LOGGER.info(
                'epoch %d %s: loss=%.6f precision=%.4f recall=%.4f f1=%.4f (%d steps)',
                row.epoch, row.split, row.loss, row.precision, row.recall, row.f1, steps,
            )
        rows += epoch_rows

        if out_dir is not None:
            with open(csv_path, 'a', newline='') as fp:
                writer = csv.writer(fp, lineterminator='\n')
                for row in epoch_rows:
                    writer.writerow(format_metrics_row(row))
            path = checkpoint_path(out_dir, epoch)
            save_checkpoint(model, path)
            _LOGGER.debug('saved %s', path)
    return rows
