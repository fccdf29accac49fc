import numpy as np

from netroute.drc import run_drc
from netroute.dataset import sample_pinset, sample_stream
from netroute.layout import GridDims, LayerId, PinSet
from netroute.router import WireClassCombo, materialize, plan_geometry, route

from .base import TestNetroute


def _active(grid, layer):
    return sorted((int(x), int(y)) for y, x in np.argwhere(grid.active(layer)))


class TestRouterRoute(TestNetroute):

    def test_vertical_two_pins(self):
        grid = route(PinSet([(3, 3), (3, 8)]))
        self.assertEqual(_active(grid, LayerId.M3), [(3, y) for y in range(3, 9)])
        for layer in (LayerId.M4, LayerId.M5, LayerId.M6, LayerId.VIA3, LayerId.VIA4, LayerId.VIA5):
            self.assertEqual(_active(grid, layer), [], layer.name)
        self.assertEqual(_active(grid, LayerId.PIN), [(3, 3), (3, 8)])

    def test_long_route(self):
        grid = route(PinSet([(4, 10), (28, 12)]))
        self.assertEqual(_active(grid, LayerId.M6), [(x, 10) for x in range(4, 29)])
        self.assertEqual(_active(grid, LayerId.M5), [(28, y) for y in range(10, 13)])
        self.assertEqual(_active(grid, LayerId.VIA5), [(28, 10)])
        self.assertEqual(int(grid.planes[[LayerId.M3, LayerId.M4, LayerId.VIA3, LayerId.VIA4]].sum()), 0)

    def test_corner(self):
        pins = PinSet([(0, 0), (5, 5)])
        grid = route(pins)
        self.assertEqual(_active(grid, LayerId.M4), [(x, 0) for x in range(6)])
        self.assertEqual(_active(grid, LayerId.M3), [(5, y) for y in range(6)])
        self.assertEqual(_active(grid, LayerId.VIA3), [(5, 0)])
        self.assertEqual(grid, materialize(plan_geometry(pins), WireClassCombo.M3M4, pins))

    def test_deterministic(self):
        pins = PinSet([(1, 30), (17, 2), (9, 9), (30, 14)])
        self.assertEqual(route(pins), route(pins))

    def test_small_grid(self):
        grid = route([(0, 0), (3, 2)], dims=GridDims(4, 5))
        self.assertEqual(grid.dims, GridDims(4, 5))
        self.assertTrue(run_drc(grid, [(0, 0), (3, 2)]).passed)

    def test_drc_closure(self):
        samples = 10000 if self.slow_enabled else self.get_option('samples', int)
        seed = self.get_option('seed', int)
        failures = []
        for index in range(samples):
            pins = sample_pinset(sample_stream(seed, index))
            report = run_drc(route(pins), pins)
            if not report.passed:
                failures.append((pins, str(report))) # pragma: no cover
        self.assertEqual(failures, [])
