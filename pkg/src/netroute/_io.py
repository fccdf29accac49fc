'''
File helpers shared by the dataset and checkpoint writers.
'''
from contextlib import contextmanager
import os
import tempfile


@contextmanager
def atomic_write(path, mode=0o644):
    '''
    Open a temporary file next to `path` for binary writing and rename it
    over `path` when the ``with`` block exits cleanly. On error the
    temporary file is removed and `path` is left untouched.

    .. code-block:: python

        with atomic_write('train.drtn') as fp:
            fp.write(payload)

    '''
    directory = os.path.dirname(os.path.abspath(path))
    fd, temp = tempfile.mkstemp(prefix='.netroute-', suffix='.tmp', dir=directory)
    try:
        with os.fdopen(fd, 'wb') as fp:
            yield fp
        os.chmod(temp, mode)
        os.replace(temp, path)
    except BaseException:
        if os.path.exists(temp):
            os.remove(temp)
        raise
