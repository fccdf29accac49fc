import threading
import time
from unittest import mock
import unittest
import warnings

import numpy as np

from netroute.pool import COLUMNS, BufferPool


class TestBufferPool(unittest.TestCase):

    maxDiff = None

    def test_acquire(self):
        pool = BufferPool(maxsize=10)

        buf = pool.acquire((4, 3), np.float32)
        self.assertEqual(buf.shape, (4, 3))
        self.assertEqual(buf.dtype, np.float32)
        pool.release(buf)

        buf2 = pool.acquire([4, 3], 'float32')
        self.assertEqual(id(buf), id(buf2))
        pool.release(buf2)

    def test_mismatch(self):
        pool = BufferPool(maxsize=10)
        buf = pool.acquire((4, 3), np.float32)
        pool.release(buf)

        other = pool.acquire((4, 3), np.float64)
        self.assertNotEqual(id(buf), id(other))
        self.assertEqual(other.dtype, np.float64)
        pool.release(other)

        other = pool.acquire((3, 4), np.float32)
        self.assertNotEqual(id(buf), id(other))
        pool.release(other)

    def test_contextmanager(self):
        pool = BufferPool(maxsize=10)

        with pool.buffer((2, 2), np.float64) as buf:
            buf[...] = 1.0
            first = id(buf)

        with pool.buffer((2, 2), np.float64) as buf:
            self.assertEqual(id(buf), first)

    def test_contextmanager_error(self):
        class BufferError_(Exception):
            pass

        pool = BufferPool(maxsize=10)

        try:
            with pool.buffer((2, 2)) as buf:
                first = id(buf)
                raise BufferError_
        except BufferError_:
            pass

        # The buffer went back to the pool.
        with pool.buffer((2, 2)) as buf:
            self.assertEqual(id(buf), first)

    def test_finalize(self):
        pool = BufferPool(maxsize=10)
        buf = pool.acquire((2, 2))
        pool.release(buf)

        pool.finalize()

        other = pool.acquire((2, 2))
        self.assertNotEqual(id(other), id(buf))
        pool.release(other)
        pool.finalize()

    def test_mismatched_release(self):
        pool = BufferPool(maxsize=10)
        pool.acquire((2, 2))

        with warnings.catch_warnings(record=True) as warns:
            warnings.simplefilter('always')
            pool.finalize()

        self.assertEqual(len(warns), 1)
        self.assertEqual(
            [str(warn.message) for warn in warns],
            ['finalize() called with unreleased buffers'] * len(warns)
        )

    def test_idlettl(self):
        idlettl = 10

        pool = BufferPool(idlettl=idlettl)

        now = time.time()

        with mock.patch('time.time', return_value=now) as mock_time:
            buf1 = pool.acquire((2, 2))
            pool.release(buf1)

            mock_time.return_value += idlettl

            buf2 = pool.acquire((2, 2))
            self.assertEqual(id(buf1), id(buf2)) # idle for exactly idlettl
            pool.release(buf2)

            mock_time.return_value += idlettl + 1

            buf3 = pool.acquire((2, 2))
            self.assertNotEqual(id(buf2), id(buf3)) # expired
            pool.release(buf3)

    def test_maxsize(self):
        pool = BufferPool(maxsize=1)

        buf1 = pool.acquire((2, 2))
        pool.release(buf1)
        buf2 = pool.acquire((2, 2))
        self.assertEqual(id(buf1), id(buf2))

        buf3 = pool.acquire((2, 2)) # newly allocated
        self.assertNotEqual(id(buf2), id(buf3))

        pool.release(buf3) # return buf3 to pool
        pool.release(buf2) # pool is full, buf3 is evicted

        buf4 = pool.acquire((2, 2))
        self.assertEqual(id(buf4), id(buf2))
        pool.release(buf4)

    def test_maxsize_evicts_stale_shapes(self):
        pool = BufferPool(maxsize=8)

        for rows in range(1, 9):
            pool.release(pool.acquire((rows, 4)))

        first = pool.acquire((100, 4))
        pool.release(first)
        second = pool.acquire((100, 4))
        self.assertIs(second, first)
        pool.release(second)

        # The oldest one-off shape made room; the newest survive.
        shapes = [pooled.buffer.shape for pooled in pool._pool] # pylint: disable=protected-access
        self.assertEqual(len(shapes), 8)
        self.assertNotIn((1, 4), shapes)
        self.assertIn((8, 4), shapes)
        self.assertEqual(shapes[-1], (100, 4))

    def test_release_twice(self):
        pool = BufferPool(maxsize=2)
        buf = pool.acquire((2, 2))
        pool.release(buf)
        self.assertRaises(AssertionError, pool.release, buf)

    def test_threads(self):
        pool = BufferPool(maxsize=4)
        errors = []

        def target():
            try:
                for _ in range(50):
                    with pool.buffer((3, 3)) as buf:
                        buf[...] = 0
            except Exception as ex: # pragma: no cover pylint: disable=broad-except
                errors.append(ex)

        threads = [threading.Thread(target=target) for _ in range(4)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        self.assertEqual(errors, [])

        with warnings.catch_warnings(record=True) as warns:
            warnings.simplefilter('always')
            pool.finalize()
        self.assertEqual(warns, [])

    def test_columns_idlettl(self):
        now = time.time()
        with mock.patch('time.time', return_value=now) as mock_time:
            with COLUMNS.buffer((3, 11), np.float32) as buf:
                first = buf
            mock_time.return_value += 61
            with COLUMNS.buffer((3, 11), np.float32) as buf:
                self.assertIsNot(buf, first) # aged out

    def test_columns(self):
        with COLUMNS.buffer((5, 7), np.float64) as buf:
            self.assertEqual(buf.shape, (5, 7))
