import unittest

import netroute


class TestNetroute(unittest.TestCase):

    def test_version(self):
        self.assertEqual(netroute.__version__, '.'.join(str(part) for part in netroute.version_info))
        self.assertEqual(len(netroute.version_info), 3)

    def test_errors(self):
        self.assertTrue(issubclass(netroute.Error, Exception))
        for error in (
                netroute.ValidationError,
                netroute.ShapeError,
                netroute.FormatError,
                netroute.NumericalError,
                netroute.InternalError,
                netroute.AcceptanceError,
        ):
            self.assertTrue(issubclass(error, netroute.Error), error)
        self.assertTrue(issubclass(netroute.ValidationError, ValueError))
        self.assertTrue(issubclass(netroute.ShapeError, netroute.ValidationError))
        self.assertTrue(issubclass(netroute.NumericalError, ArithmeticError))

    def test_format_error(self):
        error = netroute.FormatError('bad magic', 0, 'x.drtn')
        self.assertEqual(error.offset, 0)
        self.assertEqual(error.path, 'x.drtn')
        self.assertIn('bad magic', str(error))

    def test_exports(self):
        for name in ('GridDims', 'LayerId', 'LayoutGrid', 'PinSet', 'route', 'run_drc', 'ResistanceModel'):
            self.assertTrue(hasattr(netroute, name), name)
