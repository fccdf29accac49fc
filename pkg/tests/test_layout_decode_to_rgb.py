import os
from unittest import mock

import numpy as np
from PIL import Image

import netroute
from netroute.layout import GridDims, LayerId, LayoutGrid, RgbImage, decode_to_rgb, pins_grid

from .base import TestNetroute


class TestLayoutDecodeToRgb(TestNetroute):

    def test_empty(self):
        image = decode_to_rgb(LayoutGrid.empty())
        self.assertEqual(image.pixels.shape, (32, 32, 3))
        self.assertEqual(int(image.pixels.max()), 0)

    def test_colors(self):
        expected = {
            LayerId.PIN: (255, 255, 0),
            LayerId.M3: (0, 255, 0),
            LayerId.M4: (255, 0, 0),
            LayerId.M5: (128, 128, 128),
            LayerId.M6: (0, 0, 255),
            LayerId.VIA3: (255, 255, 255),
            LayerId.VIA4: (255, 255, 255),
            LayerId.VIA5: (255, 255, 255),
        }
        for layer, color in expected.items():
            grid = LayoutGrid.empty()
            grid.planes[layer, 5, 5] = 1
            pixels = decode_to_rgb(grid).pixels
            self.assertEqual(tuple(pixels[5, 5]), color, layer.name)
            self.assertEqual(tuple(pixels[5, 6]), (0, 0, 0))

    def test_priority(self):
        grid = LayoutGrid.empty()
        for layer in (LayerId.M3, LayerId.VIA3, LayerId.M4):
            grid.planes[layer, 1, 1] = 1
        grid.planes[LayerId.M6, 2, 2] = 1
        grid.planes[LayerId.M5, 2, 2] = 1
        grid.planes[LayerId.PIN, 3, 3] = 1
        grid.planes[LayerId.M3, 3, 3] = 1
        pixels = decode_to_rgb(grid).pixels
        self.assertEqual(tuple(pixels[1, 1]), (255, 255, 255))
        self.assertEqual(tuple(pixels[2, 2]), (0, 0, 255))
        self.assertEqual(tuple(pixels[3, 3]), (0, 255, 0))

    def test_ppm(self):
        grid = LayoutGrid.empty()
        grid.planes[LayerId.M4, 0, 1] = 1
        data = decode_to_rgb(grid).to_ppm()
        header = b'P6\n32 32\n255\n'
        self.assertTrue(data.startswith(header))
        self.assertEqual(len(data), len(header) + 32 * 32 * 3)
        body = data[len(header):]
        self.assertEqual(body[3:6], b'\xff\x00\x00')
        self.assertEqual(body[:3], b'\x00\x00\x00')

    def test_save_scaled(self):
        grid = LayoutGrid.empty(GridDims(2, 3))
        grid.planes[LayerId.M6, 1, 2] = 1
        with self.tempdir() as directory:
            path = os.path.join(directory, 'grid.ppm')
            decode_to_rgb(grid).save(path, scale=4)
            with Image.open(path) as image:
                self.assertEqual(image.size, (12, 8))
                pixels = np.asarray(image.convert('RGB'))
        self.assertEqual(tuple(pixels[7, 11]), (0, 0, 255))
        self.assertEqual(tuple(pixels[3, 11]), (0, 0, 0))

    def test_save_failure_keeps_previous(self):
        with self.tempdir() as directory:
            path = os.path.join(directory, 'grid.ppm')
            with open(path, 'wb') as fp:
                fp.write(b'previous')
            with mock.patch('netroute._io.os.replace', side_effect=OSError('disk full')):
                with self.assertRaises(OSError):
                    decode_to_rgb(LayoutGrid.empty()).save(path)
            with open(path, 'rb') as fp:
                self.assertEqual(fp.read(), b'previous')
            self.assertEqual(os.listdir(directory), ['grid.ppm'])

    def test_scale_invalid(self):
        with self.assertRaises(netroute.ValidationError):
            decode_to_rgb(LayoutGrid.empty()).scaled(0)

    def test_rgb_shape(self):
        with self.assertRaises(netroute.ShapeError):
            RgbImage(np.zeros((4, 4)))

    def test_pins_grid(self):
        plane = np.zeros((1, 32, 32), dtype=np.uint8)
        plane[0, 4, 9] = 1
        pixels = decode_to_rgb(pins_grid(plane)).pixels
        self.assertEqual(tuple(pixels[4, 9]), (255, 255, 0))
