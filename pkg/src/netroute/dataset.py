'''
Synthetic dataset generation and the on-disk container.

File layout, all integers little-endian::

    header   32 bytes  magic "DRTN", u16 version=1, u16 flags=0,
                       u64 sample_count, u32 height, u32 width,
                       u8 layer_count=8, 7 reserved zero bytes
    data     count * H * W bytes          one byte per pin-plane pixel
    labels   count * 8 * H * W bytes      layer-major within each sample

Pins are not stored; they are recovered from the data plane.
'''
from collections import Counter, namedtuple
from concurrent.futures import ProcessPoolExecutor
import logging
import os
import struct

import numpy as np

from ._errors import FormatError, ValidationError
from ._io import atomic_write
from .layout import LAYER_COUNT, GridDims, LayoutGrid, PinSet, encode_pins
from .router import ResistanceModel, WireClassCombo, choose_combo, plan_geometry, route

_LOGGER = logging.getLogger(__name__)

MAGIC = b'DRTN'
VERSION = 1

_HEADER = struct.Struct('<4sHHQIIB7x')
HEADER_SIZE = _HEADER.size


class DatasetHeader(namedtuple('DatasetHeader', ['magic', 'version', 'flags', 'sample_count', 'height', 'width', 'layer_count'])):
    __slots__ = ()

    @classmethod
    def for_samples(cls, count, dims):
        return cls(MAGIC, VERSION, 0, count, dims.height, dims.width, LAYER_COUNT)

    @property
    def dims(self):
        return GridDims(self.height, self.width)

    @property
    def data_size(self):
        return self.height * self.width

    @property
    def label_size(self):
        return self.layer_count * self.height * self.width

    @property
    def file_size(self):
        return HEADER_SIZE + self.sample_count * (self.data_size + self.label_size)

    def data_offset(self, index):
        return HEADER_SIZE + index * self.data_size

    def label_offset(self, index):
        return HEADER_SIZE + self.sample_count * self.data_size + index * self.label_size

    def pack(self):
        return _HEADER.pack(*self)

    @classmethod
    def unpack(cls, buf, path=None):
        if len(buf) < HEADER_SIZE:
            raise FormatError(
                'truncated header: {0} of {1} bytes'.format(len(buf), HEADER_SIZE), len(buf), path
            )
        header = cls(*_HEADER.unpack(buf[:HEADER_SIZE]))
        if header.magic != MAGIC:
            raise FormatError('bad magic {0!r}, expected {1!r}'.format(header.magic, MAGIC), 0, path)
        if header.version != VERSION:
            raise FormatError('unsupported version {0}'.format(header.version), 4, path)
        if header.flags != 0:
            raise FormatError('unsupported flags 0x{0:04x}'.format(header.flags), 6, path)
        if header.layer_count != LAYER_COUNT:
            raise FormatError(
                'layer count {0}, expected {1}'.format(header.layer_count, LAYER_COUNT), 24, path
            )
        if header.sample_count < 1:
            raise FormatError('dataset holds no samples', 8, path)
        if header.height < 1 or header.width < 1:
            raise FormatError('empty grid {0}x{1}'.format(header.width, header.height), 16, path)
        if buf[25:HEADER_SIZE] != bytes(7):
            raise FormatError('reserved header bytes are not zero', 25, path)
        return header


class Sample(namedtuple('Sample', ['pins', 'data', 'label'])):
    '''
    One training pair.

    :ivar PinSet pins: The net.
    :ivar numpy.ndarray data: The ``(1, H, W)`` binary pin plane.
    :ivar LayoutGrid label: The routed layout.
    '''
    __slots__ = ()


def make_sample(pins, model=None, dims=None):
    dims = dims or GridDims()
    return Sample(pins, encode_pins(pins, dims), route(pins, model, dims))


def sample_pinset(rng, dims=None):
    '''
    Draw a random net: a pin count uniform over ``{2, 3, 4, 5}`` and pin
    positions uniform over the grid, redrawing any position already taken.

    :param numpy.random.Generator rng: The random stream.
    :rtype: ~netroute.layout.PinSet
    '''
    dims = dims or GridDims()
    count = int(rng.integers(PinSet.MIN_PINS, PinSet.MAX_PINS + 1))
    if count > dims.cells:
        raise ValidationError('a {0}x{1} grid cannot hold {2} pins'.format(dims.width, dims.height, count))
    pins = []
    while len(pins) < count:
        pin = (int(rng.integers(dims.width)), int(rng.integers(dims.height)))
        if pin not in pins:
            pins.append(pin)
    return PinSet(pins)


def sample_stream(seed, index):
    '''
    The random stream for sample `index` of a dataset seeded with `seed`.
    Streams are independent of generation order.
    '''
    return np.random.default_rng([int(seed), int(index)])


def _generate_one(args):
    seed, index, model, dims = args
    return make_sample(sample_pinset(sample_stream(seed, index), dims), model, dims)


def _write_samples(path, count, dims, samples):
    '''
    Write `count` samples from the iterable `samples` to `path` atomically.
    '''
    header = DatasetHeader.for_samples(count, dims)
    with atomic_write(path) as fp:
        fp.write(header.pack())
        fp.truncate(header.file_size)
        written = 0
        for index, sample in enumerate(samples):
            if index >= count:
                raise ValidationError('more than {0} samples supplied'.format(count))
            data = np.asarray(sample.data, dtype=np.uint8)
            if data.shape != (1, dims.height, dims.width):
                raise ValidationError(
                    'sample {0} data has shape {1}, expected {2}'.format(
                        index, data.shape, (1, dims.height, dims.width)
                    )
                )
            if sample.label.dims != dims:
                raise ValidationError('sample {0} label is not {1}'.format(index, dims))
            fp.seek(header.data_offset(index))
            fp.write(data.tobytes())
            fp.seek(header.label_offset(index))
            fp.write(sample.label.planes.tobytes())
            written += 1
        if written != count:
            raise ValidationError('expected {0} samples, got {1}'.format(count, written))


def write(path, samples, dims=None):
    '''
    Write a sequence of :py:class:`Sample` objects to `path`.

    :param str path: The output file; replaced atomically.
    :param samples: A sized sequence of samples.
    :param GridDims dims: The grid size. Defaults to the first sample's.
    '''
    samples = list(samples)
    if not samples:
        raise ValidationError('a dataset needs at least one sample')
    dims = dims or samples[0].label.dims
    _write_samples(path, len(samples), dims, samples)


def generate(path, count, seed, model=None, dims=None, workers=1):
    '''
    Generate `count` routed samples into `path`.

    Sample ``i`` is drawn from :py:func:`sample_stream` ``(seed, i)``, so the
    file bytes depend only on ``(count, seed, model, dims)`` and not on
    `workers`.

    :param int workers: Number of worker processes; 1 generates inline.
    :return: The header written.
    :rtype: DatasetHeader
    '''
    count = int(count)
    if count < 1:
        raise ValidationError('sample count must be >= 1, got {0}'.format(count))
    model = model or ResistanceModel()
    dims = dims or GridDims()
    jobs = ((seed, index, model, dims) for index in range(count))

    _LOGGER.info('generating %d samples (seed=%d, workers=%d) into %s', count, seed, workers, path)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            chunksize = max(1, count // (workers * 8))
            _write_samples(path, count, dims, executor.map(_generate_one, jobs, chunksize=chunksize))
    else:
        _write_samples(path, count, dims, map(_generate_one, jobs))
    return DatasetHeader.for_samples(count, dims)


def pins_from_plane(plane):
    '''
    Recover a net from its ``(1, H, W)`` pin plane, in row-major order.

    :rtype: ~netroute.layout.PinSet
    '''
    plane = np.asarray(plane)
    return PinSet((int(x), int(y)) for y, x in np.argwhere(plane[0]))


class DatasetReader(object):
    '''
    Random access to a dataset file. Samples are memory-mapped; reading
    sample ``i`` touches only that sample's bytes.

    .. code-block:: python

        with netroute.dataset.read('train.drtn') as reader:
            sample = reader[0]

    :param str path: The dataset file.
    :raises netroute.FormatError: If the header is invalid or the file is
        truncated.
    '''

    __slots__ = ('path', 'header', '_data', '_labels')

    def __init__(self, path):
        self.path = path
        with open(path, 'rb') as fp:
            header = DatasetHeader.unpack(fp.read(HEADER_SIZE), path)
            fp.seek(0, os.SEEK_END)
            size = fp.tell()

        if size < header.file_size:
            data_end = header.label_offset(0)
            if size < data_end:
                index = (size - HEADER_SIZE) // header.data_size
                offset = header.data_offset(index)
                block = 'data block of sample {0}'.format(index)
            else:
                index = (size - data_end) // header.label_size
                offset = header.label_offset(index)
                block = 'label block of sample {0}'.format(index)
            raise FormatError(
                'truncated {0}: file has {1} of {2} bytes'.format(block, size, header.file_size),
                offset,
                path,
            )
        if size > header.file_size:
            raise FormatError(
                'trailing bytes: file has {0} bytes, expected {1}'.format(size, header.file_size),
                header.file_size,
                path,
            )

        self.header = header
        count, height, width = header.sample_count, header.height, header.width
        self._data = np.memmap(
            path, dtype=np.uint8, mode='r', offset=HEADER_SIZE,
            shape=(count, 1, height, width),
        )
        self._labels = np.memmap(
            path, dtype=np.uint8, mode='r', offset=header.label_offset(0),
            shape=(count, LAYER_COUNT, height, width),
        )

    @property
    def dims(self):
        return self.header.dims

    def _check_binary(self, values, indices, labels):
        if values.size and values.max() > 1:
            position = int(np.argmax(values.reshape(len(indices), -1).max(axis=1) > 1))
            index = int(indices[position])
            offset = self.header.label_offset(index) if labels else self.header.data_offset(index)
            raise FormatError(
                'non-binary {0} value in sample {1}'.format('label' if labels else 'data', index),
                offset,
                self.path,
            )
        return values

    def _indices(self, indices):
        indices = np.asarray(indices, dtype=np.int64).reshape(-1)
        if indices.size and (indices.min() < 0 or indices.max() >= len(self)):
            raise IndexError('sample index out of range for {0} samples'.format(len(self)))
        return indices

    def data(self, indices):
        '''
        The ``(n, 1, H, W)`` uint8 pin planes of the samples at `indices`.
        '''
        indices = self._indices(indices)
        return self._check_binary(np.asarray(self._data[indices]), indices, False)

    def labels(self, indices):
        '''
        The ``(n, 8, H, W)`` uint8 label planes of the samples at `indices`.
        '''
        indices = self._indices(indices)
        return self._check_binary(np.asarray(self._labels[indices]), indices, True)

    def __len__(self):
        return self.header.sample_count

    def __getitem__(self, index):
        if index < 0:
            index += len(self)
        data = self.data([index])[0]
        label = LayoutGrid(self.labels([index])[0])
        return Sample(pins_from_plane(data), data, label)

    def __iter__(self):
        for index in range(len(self)):
            yield self[index]

    def close(self):
        self._data = None
        self._labels = None

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.close()


def read(path):
    '''
    Open a dataset file.

    :rtype: DatasetReader
    '''
    return DatasetReader(path)


class InMemoryDataset(object):
    '''
    Arrays exposed through the :py:class:`DatasetReader` access interface.

    :param numpy.ndarray data: Pin planes ``(n, 1, H, W)``.
    :param numpy.ndarray labels: Labels ``(n, 8, H, W)``.
    '''

    __slots__ = ('_data', '_labels')

    def __init__(self, data, labels):
        data = np.asarray(data, dtype=np.uint8)
        labels = np.asarray(labels, dtype=np.uint8)
        if data.ndim != 4 or data.shape[1] != 1:
            raise ValidationError('data must have shape (n, 1, H, W), got {0}'.format(data.shape))
        if labels.shape != (data.shape[0], LAYER_COUNT) + data.shape[2:]:
            raise ValidationError('labels have shape {0}, expected {1}'.format(
                labels.shape, (data.shape[0], LAYER_COUNT) + data.shape[2:]
            ))
        self._data = data
        self._labels = labels

    @classmethod
    def from_samples(cls, samples):
        samples = list(samples)
        return cls(
            np.stack([sample.data for sample in samples]),
            np.stack([sample.label.planes for sample in samples]),
        )

    @property
    def dims(self):
        return GridDims(*self._data.shape[2:])

    def data(self, indices):
        return self._data[np.asarray(indices, dtype=np.int64).reshape(-1)]

    def labels(self, indices):
        return self._labels[np.asarray(indices, dtype=np.int64).reshape(-1)]

    def __len__(self):
        return self._data.shape[0]


def batch_order(count, batch_size, epoch_seed):
    '''
    Split a permutation of ``range(count)`` into batches of `batch_size`;
    the final batch may be short.

    :param epoch_seed: Seed (int or sequence of ints) fixing the permutation.
    :rtype: list(numpy.ndarray)
    '''
    batch_size = int(batch_size)
    if not 1 <= batch_size <= count:
        raise ValidationError(
            'batch size must be in [1, {0}], got {1}'.format(count, batch_size)
        )
    order = np.random.default_rng(epoch_seed).permutation(count)
    return [order[start:start + batch_size] for start in range(0, count, batch_size)]


def batches(reader, batch_size, epoch_seed):
    '''
    Iterate one epoch of float32 mini-batches ``(data, labels)`` of shapes
    ``(n, 1, H, W)`` and ``(n, 8, H, W)``.

    :param DatasetReader reader: The dataset.
    :param int batch_size: Samples per batch.
    :param epoch_seed: Seed fixing the visit order.
    '''
    for indices in batch_order(len(reader), batch_size, epoch_seed):
        yield (
            reader.data(indices).astype(np.float32),
            reader.labels(indices).astype(np.float32),
        )


ComboStatistics = namedtuple('ComboStatistics', ['count', 'frequency', 'mean_length'])


def combo_statistics(reader, model=None):
    '''
    Tally the wire class combination of every sample, re-planned from its
    stored pins under `model`.

    :return: A mapping of :py:class:`~netroute.router.WireClassCombo` to
        :py:class:`ComboStatistics`.
    :rtype: dict
    '''
    counts = Counter()
    lengths = Counter()
    for index in range(len(reader)):
        plan = plan_geometry(pins_from_plane(reader.data([index])[0]))
        combo = choose_combo(plan.total_length, model)
        counts[combo] += 1
        lengths[combo] += plan.total_length
    total = sum(counts.values())
    return dict(
        (
            combo,
            ComboStatistics(
                counts[combo],
                counts[combo] / total if total else 0.0,
                lengths[combo] / counts[combo] if counts[combo] else 0.0,
            ),
        )
        for combo in WireClassCombo
    )
