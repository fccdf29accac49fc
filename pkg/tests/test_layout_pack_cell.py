from hypothesis import given, strategies as st
import numpy as np

import netroute
from netroute.layout import GridDims, LayerId, LayoutGrid, pack_cell, pack_grid, unpack_cell, unpack_grid

from .base import TestNetroute


class TestLayoutPackCell(TestNetroute):

    def test_empty(self):
        self.assertEqual(pack_cell(LayoutGrid.empty(), 5, 5), 0x00)

    def test_pin(self):
        grid = LayoutGrid.empty()
        grid.planes[LayerId.PIN, 7, 3] = 1
        self.assertEqual(pack_cell(grid, 3, 7), 0x01)

    def test_stack(self):
        grid = LayoutGrid.empty()
        for layer in (LayerId.M3, LayerId.VIA3, LayerId.M4):
            grid.planes[layer, 2, 9] = 1
        self.assertEqual(pack_cell(grid, 9, 2), 0x0E)

    def test_every_mask(self):
        for mask in range(256):
            grid = LayoutGrid.empty(GridDims(1, 1))
            grid.planes[:, 0, 0] = unpack_cell(mask)
            self.assertEqual(pack_cell(grid, 0, 0), mask)

    def test_unpack_cell(self):
        self.assertEqual(unpack_cell(0x0E), (0, 1, 1, 1, 0, 0, 0, 0))
        with self.assertRaises(netroute.ValidationError):
            unpack_cell(256)

    def test_out_of_range(self):
        with self.assertRaises(netroute.ValidationError):
            pack_cell(LayoutGrid.empty(), 32, 0)

    @given(st.lists(st.integers(0, 255), min_size=12, max_size=12))
    def test_grid(self, masks):
        masks = np.array(masks, dtype=np.uint8).reshape(3, 4)
        grid = unpack_grid(masks)
        self.assertEqual(grid.dims, GridDims(3, 4))
        np.testing.assert_array_equal(pack_grid(grid), masks)
        self.assertEqual(pack_cell(grid, 2, 1), int(masks[1, 2]))
