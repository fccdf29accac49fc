import os

import numpy as np

import netroute
from netroute.dataset import HEADER_SIZE, InMemoryDataset, make_sample, pins_from_plane, read, write
from netroute.layout import GridDims, LayerId, PinSet

from .base import TestNetroute


SAMPLES = [
    make_sample(PinSet([(3, 3), (3, 8)])),
    make_sample(PinSet([(4, 10), (28, 12)])),
    make_sample(PinSet([(0, 0), (5, 5), (31, 31)])),
]


class TestDatasetRead(TestNetroute):

    def _write(self, directory, samples=SAMPLES):
        path = os.path.join(directory, 'hand.drtn')
        write(path, samples)
        return path

    def _corrupt(self, path, offset, payload):
        with open(path, 'r+b') as fp:
            fp.seek(offset)
            fp.write(payload)

    def test_round_trip(self):
        with self.tempdir() as directory:
            path = self._write(directory)
            with read(path) as reader:
                self.assertEqual(len(reader), 3)
                for sample, expected in zip(reader, SAMPLES):
                    np.testing.assert_array_equal(sample.data, expected.data)
                    self.assertEqual(sample.label, expected.label)
                    self.assertEqual(set(sample.pins), set(expected.pins))
                self.assertEqual(reader[-1].label, SAMPLES[-1].label)
            with open(path, 'rb') as fp:
                first = fp.read()
            with read(path) as reader:
                write(path, list(reader))
            with open(path, 'rb') as fp:
                self.assertEqual(fp.read(), first)

    def test_bad_magic(self):
        with self.tempdir() as directory:
            path = self._write(directory)
            self._corrupt(path, 0, b'XXXX')
            with self.assertRaises(netroute.FormatError) as cm:
                read(path)
            self.assertEqual(cm.exception.offset, 0)
            self.assertEqual(cm.exception.path, path)

    def test_bad_version(self):
        with self.tempdir() as directory:
            path = self._write(directory)
            self._corrupt(path, 4, b'\x02\x00')
            with self.assertRaises(netroute.FormatError) as cm:
                read(path)
            self.assertEqual(cm.exception.offset, 4)

    def test_bad_reserved(self):
        with self.tempdir() as directory:
            path = self._write(directory)
            self._corrupt(path, 30, b'\x01')
            with self.assertRaises(netroute.FormatError) as cm:
                read(path)
            self.assertEqual(cm.exception.offset, 25)

    def test_truncated_label(self):
        with self.tempdir() as directory:
            path = self._write(directory)
            size = HEADER_SIZE + 3 * 1024 + 2 * 8192 + 100
            with open(path, 'r+b') as fp:
                fp.truncate(size)
            with self.assertRaises(netroute.FormatError) as cm:
                read(path)
            self.assertEqual(cm.exception.offset, HEADER_SIZE + 3 * 1024 + 2 * 8192)
            self.assertIn('label block of sample 2', str(cm.exception))

    def test_truncated_data(self):
        with self.tempdir() as directory:
            path = self._write(directory)
            with open(path, 'r+b') as fp:
                fp.truncate(HEADER_SIZE + 1500)
            with self.assertRaises(netroute.FormatError) as cm:
                read(path)
            self.assertEqual(cm.exception.offset, HEADER_SIZE + 1024)
            self.assertIn('data block of sample 1', str(cm.exception))

    def test_truncated_header(self):
        with self.tempdir() as directory:
            path = os.path.join(directory, 'short.drtn')
            with open(path, 'wb') as fp:
                fp.write(b'DRTN\x01\x00')
            with self.assertRaises(netroute.FormatError):
                read(path)

    def test_trailing_bytes(self):
        with self.tempdir() as directory:
            path = self._write(directory)
            with open(path, 'ab') as fp:
                fp.write(b'\x00')
            with self.assertRaises(netroute.FormatError) as cm:
                read(path)
            self.assertEqual(cm.exception.offset, HEADER_SIZE + 3 * 9 * 1024)

    def test_non_binary_label(self):
        with self.tempdir() as directory:
            path = self._write(directory)
            self._corrupt(path, HEADER_SIZE + 3 * 1024 + 8192 + 17, b'\x02')
            with read(path) as reader:
                reader.labels([0])
                with self.assertRaises(netroute.FormatError) as cm:
                    reader.labels([0, 1])
                self.assertEqual(cm.exception.offset, HEADER_SIZE + 3 * 1024 + 8192)

    def test_index_range(self):
        with self.tempdir() as directory:
            with read(self._write(directory)) as reader:
                with self.assertRaises(IndexError):
                    reader.data([3])

    def test_empty_write(self):
        with self.tempdir() as directory:
            with self.assertRaises(netroute.ValidationError):
                write(os.path.join(directory, 'none.drtn'), [])

    def test_missing_file(self):
        with self.tempdir() as directory:
            with self.assertRaises(OSError):
                read(os.path.join(directory, 'absent.drtn'))


class TestDatasetPinsFromPlane(TestNetroute):

    def test_row_major(self):
        plane = np.zeros((1, 32, 32), dtype=np.uint8)
        plane[0, 9, 1] = 1
        plane[0, 2, 30] = 1
        plane[0, 2, 4] = 1
        self.assertEqual(list(pins_from_plane(plane)), [(4, 2), (30, 2), (1, 9)])


class TestDatasetInMemory(TestNetroute):

    def test_access(self):
        dataset = InMemoryDataset.from_samples(SAMPLES)
        self.assertEqual(len(dataset), 3)
        self.assertEqual(dataset.dims, GridDims())
        self.assertEqual(dataset.data([2, 0]).shape, (2, 1, 32, 32))
        self.assertEqual(dataset.labels([1])[0, LayerId.VIA5, 10, 28], 1)

    def test_shapes(self):
        with self.assertRaises(netroute.ValidationError):
            InMemoryDataset(np.zeros((2, 1, 4, 4)), np.zeros((2, 7, 4, 4)))
