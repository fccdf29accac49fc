import os
import struct

import numpy as np

import netroute
from netroute.dataset import (
    HEADER_SIZE,
    DatasetHeader,
    generate,
    make_sample,
    read,
    sample_pinset,
    sample_stream,
)
from netroute.drc import run_drc
from netroute.layout import GridDims, PinSet
from netroute.router import ResistanceModel

from .base import TestNetroute


class TestDatasetSamplePinset(TestNetroute):

    def test_valid(self):
        rng = np.random.default_rng(1)
        for _ in range(500):
            pins = sample_pinset(rng)
            self.assertTrue(2 <= len(pins) <= 5)
            self.assertEqual(len(set(pins)), len(pins))
            pins.validate(GridDims())

    def test_deterministic(self):
        self.assertEqual(sample_pinset(sample_stream(7, 3)), sample_pinset(sample_stream(7, 3)))
        self.assertNotEqual(
            [sample_pinset(sample_stream(7, index)) for index in range(4)],
            [sample_pinset(sample_stream(8, index)) for index in range(4)],
        )

    def test_count_distribution(self):
        rng = np.random.default_rng(self.get_option('seed', int))
        draws = 100000
        counts = np.bincount([len(sample_pinset(rng)) for _ in range(draws)], minlength=6)
        for count in range(2, 6):
            self.assertAlmostEqual(counts[count] / float(draws), 0.25, delta=0.01)

    def test_crowded_grid(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            pins = sample_pinset(rng, GridDims(1, 5))
            self.assertEqual(len(set(pins)), len(pins))
        with self.assertRaises(netroute.ValidationError):
            for _ in range(50):
                sample_pinset(rng, GridDims(1, 2))


class TestDatasetGenerate(TestNetroute):

    def test_header(self):
        with self.tempdir() as directory:
            path = os.path.join(directory, 'four.drtn')
            header = generate(path, 4, 7)
            with open(path, 'rb') as fp:
                raw = fp.read()
        self.assertEqual(header, DatasetHeader(b'DRTN', 1, 0, 4, 32, 32, 8))
        self.assertEqual(len(raw), HEADER_SIZE + 4 * (1024 + 8 * 1024))
        self.assertEqual(raw[:4], b'DRTN')
        self.assertEqual(struct.unpack_from('<HHQIIB', raw, 4), (1, 0, 4, 32, 32, 8))
        self.assertEqual(raw[25:32], bytes(7))

    def test_deterministic(self):
        with self.tempdir() as directory:
            paths = [os.path.join(directory, name) for name in ('a.drtn', 'b.drtn', 'c.drtn')]
            generate(paths[0], 4, 7)
            generate(paths[1], 4, 7)
            generate(paths[2], 4, 7, workers=2)
            contents = []
            for path in paths:
                with open(path, 'rb') as fp:
                    contents.append(fp.read())
        self.assertEqual(contents[0], contents[1])
        self.assertEqual(contents[0], contents[2])

    def test_samples_match_router(self):
        with self.tempdir() as directory:
            path = os.path.join(directory, 'set.drtn')
            generate(path, 25, 3)
            with read(path) as reader:
                for index, sample in enumerate(reader):
                    pins = sample_pinset(sample_stream(3, index))
                    self.assertEqual(sample.pins, PinSet(sorted(pins, key=lambda pin: (pin[1], pin[0]))))
                    self.assertEqual(sample.label, make_sample(pins).label)
                    self.assertTrue(run_drc(sample.label, sample.pins).passed)

    def test_model_and_dims(self):
        with self.tempdir() as directory:
            path = os.path.join(directory, 'small.drtn')
            generate(path, 3, 1, ResistanceModel.balanced(), GridDims(8, 12))
            with read(path) as reader:
                self.assertEqual(reader.dims, GridDims(8, 12))
                self.assertEqual(reader.data([0]).shape, (1, 1, 8, 12))
                self.assertEqual(reader.labels([0, 2]).shape, (2, 8, 8, 12))

    def test_zero_count(self):
        with self.tempdir() as directory:
            path = os.path.join(directory, 'none.drtn')
            with self.assertRaises(netroute.ValidationError):
                generate(path, 0, 1)
            self.assertFalse(os.path.exists(path))
            self.assertEqual(os.listdir(directory), [])
