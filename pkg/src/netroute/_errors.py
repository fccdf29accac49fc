'''
Exceptions raised by :py:mod:`netroute`.

All library errors derive from :py:exc:`netroute.Error` so callers can catch
every failure with a single ``except`` clause.
'''


class Error(Exception):
    '''
    Exception that is the base class of all other error exceptions. You
    can use this to catch all errors with one single except statement.
    '''


class ValidationError(Error, ValueError):
    '''
    Exception raised for arguments that violate a documented precondition,
    e.g. an out-of-range pin, a zero sample count or an even filter size.
    '''


class ShapeError(ValidationError):
    '''
    Exception raised when tensor shapes or channel counts do not agree.
    '''


class FormatError(Error):
    '''
    Exception raised when a dataset or checkpoint file cannot be decoded.

    :ivar int offset: The byte offset at which decoding failed.
    :ivar str path: The file being decoded, if known.
    '''

    def __init__(self, message, offset=None, path=None):
        if offset is not None:
            message = '{0} (at byte offset {1})'.format(message, offset)
        if path is not None:
            message = '{0}: {1}'.format(path, message)
        Error.__init__(self, message)
        self.offset = offset
        self.path = path


class NumericalError(Error, ArithmeticError):
    '''
    Exception raised when a loss or gradient becomes non-finite.

    :ivar str block: The name of the offending parameter block, if any.
    '''

    def __init__(self, message, block=None):
        Error.__init__(self, message)
        self.block = block


class InternalError(Error):
    '''
    Exception raised when the library encounters an inconsistent internal
    state, e.g. a route plan whose legs do not meet the branch.
    '''


class AcceptanceError(Error):
    '''
    Exception raised when an audit (design-rule check or gradient check)
    finds a failing sample.
    '''
