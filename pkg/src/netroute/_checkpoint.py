'''
Checkpoint container for :py:class:`~netroute.fcn.FcnModel`.

Layout, all values little-endian::

    prefix   magic "DRCK", u16 version=1, u32 epoch
    config   u16 n_stages, first_filter, inner_filter, channels, layers,
             classes; u32 height, width; f64 leaky_slope, k0, k1, l2,
             bn_momentum, bn_epsilon
    adam     f64 lr, beta1, beta2, epsilon; u64 t
    stages   per stage, float32 blocks: weight, bias, then for normalized
             stages gamma, beta, running_mean, running_var; followed by
             the Adam m and v blocks of the stage's trainable parameters
'''
import struct

import numpy as np

from ._errors import FormatError
from ._io import atomic_write
from .fcn import FcnConfig, FcnModel, build
from .layout import GridDims
from .nn import LossConfig

MAGIC = b'DRCK'
VERSION = 1

_PREFIX = struct.Struct('<4sHI')
_CONFIG = struct.Struct('<6H2I6d')
_ADAM = struct.Struct('<4dQ')

_FLOAT = np.dtype('<f4')


def _stage_blocks(model):
    '''Per stage, the arrays stored for it in order.'''
    params = model.parameters()
    position = 0
    blocks = []
    for index, conv in enumerate(model.convs):
        trainable = 2
        stage = [conv.weight, conv.bias]
        if index < len(model.norms):
            norm = model.norms[index]
            trainable = 4
            stage += [norm.gamma, norm.beta, norm.running_mean, norm.running_var]
        stage += model.adam.m[position:position + trainable]
        stage += model.adam.v[position:position + trainable]
        position += trainable
        blocks.append(stage)
    assert position == len(params)
    return blocks


def save_checkpoint(model, path, epoch=None):
    '''
    Write `model` to `path` atomically. Parameters are stored as float32.

    :param int epoch: The epoch to record; defaults to ``model.epoch``.
    '''
    config = model.config
    adam = model.adam
    epoch = model.epoch if epoch is None else epoch
    with atomic_write(path) as fp:
        fp.write(_PREFIX.pack(MAGIC, VERSION, epoch))
        fp.write(_CONFIG.pack(
            config.n_stages, config.first_filter, config.inner_filter, config.channels,
            config.layers, config.classes, config.dims.height, config.dims.width,
            config.leaky_slope, config.loss.k0, config.loss.k1, config.loss.l2,
            config.bn_momentum, config.bn_epsilon,
        ))
        fp.write(_ADAM.pack(adam.lr, adam.beta1, adam.beta2, adam.epsilon, adam.t))
        for stage in _stage_blocks(model):
            for block in stage:
                fp.write(np.ascontiguousarray(block, dtype=_FLOAT).tobytes())


def _unpack(layout, buf, offset, path):
    if len(buf) < offset + layout.size:
        raise FormatError('truncated checkpoint header', len(buf), path)
    return layout.unpack_from(buf, offset), offset + layout.size


def load_checkpoint(path):
    '''
    Read a checkpoint written by :py:func:`save_checkpoint`.

    :return: A float32 model whose ``epoch`` is the recorded epoch.
    :rtype: ~netroute.fcn.FcnModel
    :raises netroute.FormatError: On a bad magic, an unknown version, an
        invalid configuration, or a truncated or oversized file.
    '''
    with open(path, 'rb') as fp:
        buf = fp.read()

    (magic, version, epoch), offset = _unpack(_PREFIX, buf, 0, path)
    if magic != MAGIC:
        raise FormatError('bad magic {0!r}, expected {1!r}'.format(magic, MAGIC), 0, path)
    if version != VERSION:
        raise FormatError('unsupported checkpoint version {0}'.format(version), 4, path)

    config_offset = offset
    fields, offset = _unpack(_CONFIG, buf, offset, path)
    (n_stages, first, inner, channels, layers, classes, height, width,
     slope, k0, k1, l2, momentum, epsilon) = fields
    try:
        config = FcnConfig(
            n_stages, first, inner, channels, layers, classes, GridDims(height, width),
            slope, LossConfig(k0, k1, l2), momentum, epsilon,
        )
    except ValueError as ex:
        raise FormatError('invalid network configuration: {0}'.format(ex), config_offset, path)

    (lr, beta1, beta2, adam_epsilon, step), offset = _unpack(_ADAM, buf, offset, path)

    model = build(config, seed=0, dtype=np.float32, lr=lr)
    model.epoch = epoch
    model.adam.beta1, model.adam.beta2, model.adam.epsilon = beta1, beta2, adam_epsilon
    model.adam.t = step

    for index, stage in enumerate(_stage_blocks(model)):
        for block in stage:
            nbytes = block.size * _FLOAT.itemsize
            if len(buf) < offset + nbytes:
                raise FormatError('truncated parameters of stage {0}'.format(index + 1), offset, path)
            block[...] = np.frombuffer(buf, dtype=_FLOAT, count=block.size, offset=offset).reshape(block.shape)
            offset += nbytes
    if offset != len(buf):
        raise FormatError('{0} trailing bytes'.format(len(buf) - offset), offset, path)
    return model
