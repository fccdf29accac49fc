from contextlib import contextmanager
from collections import namedtuple
import threading
import time
import warnings

import numpy as np

PooledBuffer = namedtuple('PooledBuffer', ['buffer', 'released'])


class BufferPool(object): # pylint: disable=too-many-instance-attributes,useless-object-inheritance
    '''
    A pool of reusable scratch arrays, keyed by shape and dtype.

    The convolution kernels unfold their input into large column matrices on
    every call; borrowing those matrices from a pool keeps a training loop
    from reallocating them each step.

    Example usage:

    .. code-block:: python

        pool = BufferPool(maxsize=8)

        columns = pool.acquire((10240, 1089), numpy.float32)
        try:
            numpy.copyto(columns.reshape(windows.shape), windows)
        finally:
            pool.release(columns)

    .. note:: Idle buffer collection only occurs during calls to
        :py:meth:`.acquire()` and does not happen automatically in the
        background.

    :param float idlettl: The maximum time, in seconds, a buffer can sit
        idle before it is discarded. If not specified, buffers are retained
        indefinitely.

    :param int maxsize: The maximum number of idle buffers to keep in the
        pool. Releasing into a full pool evicts the least recently used one.
    '''

    # Use __slots__ to minimize footprint.
    __slots__ = (
        '_lock',
        '_idlettl',
        '_maxsize',
        '_nbuffers',
        '_pool',
    )

    def __init__(
            self,
            idlettl=None,
            maxsize=None,
    ):
        # The number of buffers currently allocated.
        self._nbuffers = 0

        self._lock = threading.Lock()

        self._maxsize = maxsize
        self._idlettl = idlettl

        # Pool of buffers. Ordered from least to most recently used.
        self._pool = []

    def __del__(self):
        self.finalize()

    @contextmanager
    def buffer(self, shape, dtype=np.float32):
        '''
        Acquire a buffer in a managed context for use with the Python
        `with` keyword.

        .. code-block:: python

            with pool.buffer((n, k), numpy.float32) as columns:
                # fill and use columns

        '''
        buf = self.acquire(shape, dtype)
        try:
            yield buf
        finally:
            self.release(buf)

    def acquire(self, shape, dtype=np.float32):
        '''
        Get a buffer of `shape` and `dtype` from the pool.
        This will return an existing buffer, if a matching one is available
        in the pool, or allocate a new one. Contents are undefined.
        '''
        shape = tuple(int(dim) for dim in shape)
        dtype = np.dtype(dtype)

        with self._lock:
            # Drop stale buffers and take the least recently used match.
            now = time.time()
            match = None
            for pooled in list(self._pool):
                if self._idlettl is not None and (pooled.released + self._idlettl) < now:
                    self._pool.remove(pooled)
                    self._nbuffers -= 1
                elif match is None and pooled.buffer.shape == shape and pooled.buffer.dtype == dtype:
                    match = pooled
            if match is not None:
                self._pool.remove(match)
                return match.buffer

            buf = np.empty(shape, dtype=dtype)
            self._nbuffers += 1

            return buf

    def release(self, buf):
        '''
        Return a buffer back to the pool.

        .. note:: This must be called once for every successful call to
            :py:meth:`.acquire()`.

        :param buf: The array returned by :py:meth:`.acquire()`.
        '''
        with self._lock:
            assert self._nbuffers > len(self._pool), \
                '.release() called multiple times for same buffer'
            if self._maxsize is not None and len(self._pool) >= self._maxsize:
                self._pool.pop(0)
                self._nbuffers -= 1
            self._pool.append(PooledBuffer(buf, time.time()))

    def finalize(self):
        '''
        Release all buffers contained in the pool.
        '''
        with self._lock:
            if self._nbuffers != len(self._pool):
                warnings.warn('finalize() called with unreleased buffers', RuntimeWarning, 2)

            del self._pool[:]
            self._nbuffers = 0


# Shared pool for the convolution kernels.
COLUMNS = BufferPool(idlettl=60, maxsize=8)
