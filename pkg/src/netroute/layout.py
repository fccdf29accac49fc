'''
Grid and layer data model.

A layout is a stack of 8 binary planes over a pixel grid, one plane per
:py:class:`LayerId`. Coordinates are ``(x, y)`` with ``x`` the column and
``y`` the row, origin at the top-left pixel.
'''
from collections import namedtuple
import enum
import io

import numpy as np
from PIL import Image

from ._errors import ShapeError, ValidationError
from ._io import atomic_write


class LayerId(enum.IntEnum):
    '''
    Layout layers in canonical order. The value is the plane index in a
    :py:class:`LayoutGrid`, the channel index of encoded tensors and the bit
    position in :py:func:`pack_cell` masks.
    '''
    PIN = 0
    M3 = 1
    VIA3 = 2
    M4 = 3
    VIA4 = 4
    M5 = 5
    VIA5 = 6
    M6 = 7


LAYER_COUNT = len(LayerId)

METAL_LAYERS = (LayerId.M3, LayerId.M4, LayerId.M5, LayerId.M6)

# Odd metals run vertically, even metals horizontally.
VERTICAL_METALS = (LayerId.M3, LayerId.M5)
HORIZONTAL_METALS = (LayerId.M4, LayerId.M6)

# Via_n joins M_n (lower plate) and M_n+1 (upper plate).
VIA_PLATES = {
    LayerId.VIA3: (LayerId.M3, LayerId.M4),
    LayerId.VIA4: (LayerId.M4, LayerId.M5),
    LayerId.VIA5: (LayerId.M5, LayerId.M6),
}

LAYER_COLORS = {
    LayerId.PIN: (255, 255, 0),
    LayerId.M3: (0, 255, 0),
    LayerId.VIA3: (255, 255, 255),
    LayerId.M4: (255, 0, 0),
    LayerId.VIA4: (255, 255, 255),
    LayerId.M5: (128, 128, 128),
    LayerId.VIA5: (255, 255, 255),
    LayerId.M6: (0, 0, 255),
}

BACKGROUND_COLOR = (0, 0, 0)

# Highest priority first; the first active layer at a pixel sets its color.
RENDER_PRIORITY = (
    LayerId.VIA5,
    LayerId.VIA4,
    LayerId.VIA3,
    LayerId.M6,
    LayerId.M5,
    LayerId.M4,
    LayerId.M3,
    LayerId.PIN,
)


class GridDims(namedtuple('GridDims', ['height', 'width'])):
    '''
    Pixel dimensions of a layout grid.

    :param int height: Number of rows. Defaults to 32.
    :param int width: Number of columns. Defaults to 32.
    '''
    __slots__ = ()

    def __new__(cls, height=32, width=32):
        height, width = int(height), int(width)
        if height < 1 or width < 1:
            raise ValidationError(
                'grid dimensions must be positive, got {0}x{1}'.format(height, width)
            )
        return super(GridDims, cls).__new__(cls, height, width)

    def contains(self, x, y):
        return 0 <= x < self.width and 0 <= y < self.height

    @property
    def cells(self):
        return self.height * self.width


class PinSet(object):
    '''
    An ordered set of 2 to 5 distinct pin coordinates.

    :param pins: An iterable of ``(x, y)`` pairs.
    :raises netroute.ValidationError: If the count is outside ``[2, 5]`` or
        a coordinate is repeated.
    '''

    __slots__ = ('_pins',)

    MIN_PINS = 2
    MAX_PINS = 5

    def __init__(self, pins):
        try:
            pins = tuple((int(x), int(y)) for x, y in pins)
        except (TypeError, ValueError) as ex:
            raise ValidationError('pins must be (x, y) integer pairs: {0}'.format(ex))

        if not self.MIN_PINS <= len(pins) <= self.MAX_PINS:
            raise ValidationError(
                'a net needs {0} to {1} pins, got {2}'.format(self.MIN_PINS, self.MAX_PINS, len(pins))
            )
        seen = set()
        for pin in pins:
            if pin in seen:
                raise ValidationError('duplicate pin at {0}'.format(pin))
            seen.add(pin)
        self._pins = pins

    @classmethod
    def parse(cls, text):
        '''
        Parse a pins string of the form ``"x,y;x,y;..."``.

        :param str text: Decimal ``x,y`` pairs separated by ``;``.
        :rtype: PinSet
        '''
        pins = []
        for item in text.strip().split(';'):
            parts = item.split(',')
            if len(parts) != 2:
                raise ValidationError(
                    'malformed pin {0!r}; expected "x,y" pairs separated by ";"'.format(item)
                )
            try:
                pins.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ValidationError(
                    'malformed pin {0!r}; coordinates must be decimal integers'.format(item)
                )
        return cls(pins)

    def validate(self, dims):
        '''
        Verify every pin lies on a grid of size `dims`.

        :raises netroute.ValidationError: If a pin is out of range.
        '''
        for x, y in self._pins:
            if not dims.contains(x, y):
                raise ValidationError(
                    'pin {0} outside the {1}x{2} grid'.format((x, y), dims.width, dims.height)
                )
        return self

    @property
    def xs(self):
        return tuple(x for x, _ in self._pins)

    @property
    def ys(self):
        return tuple(y for _, y in self._pins)

    def __iter__(self):
        return iter(self._pins)

    def __len__(self):
        return len(self._pins)

    def __getitem__(self, index):
        return self._pins[index]

    def __eq__(self, other):
        if not isinstance(other, PinSet):
            return NotImplemented
        return self._pins == other._pins

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        return hash(self._pins)

    def __repr__(self):
        return 'PinSet({0!r})'.format(list(self._pins))


def _as_pinset(pins):
    return pins if isinstance(pins, PinSet) else PinSet(pins)


class LayoutGrid(object):
    '''
    Eight binary planes over a pixel grid, indexed by :py:class:`LayerId`.

    :param planes: An array-like of shape ``(8, H, W)`` holding only 0 and 1.
    :raises netroute.ValidationError: If a value is not binary.
    '''

    __slots__ = ('planes',)

    def __init__(self, planes):
        planes = np.asarray(planes)
        if planes.ndim != 3 or planes.shape[0] != LAYER_COUNT:
            raise ShapeError(
                'layout planes must have shape (8, H, W), got {0}'.format(planes.shape)
            )
        if planes.size and not np.isin(planes, (0, 1)).all():
            raise ValidationError('layout planes must be binary')
        self.planes = np.array(planes, dtype=np.uint8, copy=True)

    @classmethod
    def empty(cls, dims=None):
        dims = dims or GridDims()
        return cls(np.zeros((LAYER_COUNT, dims.height, dims.width), dtype=np.uint8))

    @property
    def dims(self):
        return GridDims(self.planes.shape[1], self.planes.shape[2])

    def plane(self, layer):
        return self.planes[int(layer)]

    def active(self, layer):
        return self.planes[int(layer)].astype(bool)

    def copy(self):
        return LayoutGrid(self.planes)

    def __eq__(self, other):
        if not isinstance(other, LayoutGrid):
            return NotImplemented
        return np.array_equal(self.planes, other.planes)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __repr__(self):
        dims = self.dims
        return '<netroute.LayoutGrid {0}x{1}, {2} active>'.format(
            dims.width, dims.height, int(self.planes.sum())
        )


def encode_pins(pins, dims=None):
    '''
    Encode a net's pins as a single binary plane of shape ``(1, H, W)``.

    :param pins: A :py:class:`PinSet` or iterable of ``(x, y)`` pairs.
    :param GridDims dims: The grid size. Defaults to 32x32.
    :rtype: numpy.ndarray
    :raises netroute.ValidationError: For out-of-range or duplicate pins.
    '''
    dims = dims or GridDims()
    pins = _as_pinset(pins).validate(dims)
    plane = np.zeros((1, dims.height, dims.width), dtype=np.uint8)
    plane[0, pins.ys, pins.xs] = 1
    return plane


def _check_cell(dims, x, y):
    if not dims.contains(x, y):
        raise ValidationError(
            'cell {0} outside the {1}x{2} grid'.format((x, y), dims.width, dims.height)
        )


def pack_cell(grid, x, y):
    '''
    Pack the 8 layer values at ``(x, y)`` into one byte; bit ``i`` holds
    layer ``LayerId(i)``.

    :rtype: int
    '''
    _check_cell(grid.dims, x, y)
    return int(np.packbits(grid.planes[:, y, x], bitorder='little')[0])


def unpack_cell(mask):
    '''
    Inverse of :py:func:`pack_cell`.

    :param int mask: A value in ``[0, 255]``.
    :return: The 8 layer values in canonical order.
    :rtype: tuple(int)
    '''
    mask = int(mask)
    if not 0 <= mask <= 0xFF:
        raise ValidationError('cell mask must fit in 8 bits, got {0}'.format(mask))
    return tuple((mask >> layer) & 1 for layer in range(LAYER_COUNT))


def pack_grid(grid):
    '''
    Pack every cell of `grid` at once.

    :return: An ``(H, W)`` array of 8-bit masks.
    :rtype: numpy.ndarray
    '''
    return np.packbits(grid.planes, axis=0, bitorder='little')[0]


def unpack_grid(masks):
    masks = np.asarray(masks, dtype=np.uint8)
    return LayoutGrid(np.unpackbits(masks[np.newaxis], axis=0, count=LAYER_COUNT, bitorder='little'))


class RgbImage(object):
    '''
    An 8-bit RGB raster, ``pixels`` of shape ``(H, W, 3)``.
    '''

    __slots__ = ('pixels',)

    def __init__(self, pixels):
        pixels = np.asarray(pixels)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise ShapeError('RGB pixels must have shape (H, W, 3), got {0}'.format(pixels.shape))
        self.pixels = np.ascontiguousarray(pixels, dtype=np.uint8)

    @property
    def dims(self):
        return GridDims(self.pixels.shape[0], self.pixels.shape[1])

    def scaled(self, factor):
        '''
        Enlarge by an integer `factor` using nearest-neighbour replication.
        '''
        factor = int(factor)
        if factor < 1:
            raise ValidationError('scale factor must be >= 1, got {0}'.format(factor))
        return RgbImage(self.pixels.repeat(factor, axis=0).repeat(factor, axis=1))

    def to_ppm(self):
        '''
        Serialize as binary PPM (P6, maxval 255).

        :rtype: bytes
        '''
        buf = io.BytesIO()
        Image.fromarray(self.pixels, 'RGB').save(buf, format='PPM')
        return buf.getvalue()

    def save(self, path, scale=1):
        '''
        Write the image as a binary PPM, replacing `path` only once the
        whole file is written.
        '''
        data = (self.scaled(scale) if scale != 1 else self).to_ppm()
        with atomic_write(path) as fp:
            fp.write(data)

    def __eq__(self, other):
        if not isinstance(other, RgbImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None


def decode_to_rgb(grid):
    '''
    Render a layout for viewing. Each pixel takes the color of its
    highest-priority active layer (see :py:data:`RENDER_PRIORITY`); empty
    pixels are black.

    :param LayoutGrid grid: The layout to render.
    :rtype: RgbImage
    '''
    dims = grid.dims
    pixels = np.empty((dims.height, dims.width, 3), dtype=np.uint8)
    pixels[...] = BACKGROUND_COLOR
    for layer in reversed(RENDER_PRIORITY):
        pixels[grid.active(layer)] = LAYER_COLORS[layer]
    return RgbImage(pixels)


def pins_grid(plane):
    '''
    Wrap a ``(1, H, W)`` pin plane in a :py:class:`LayoutGrid` with only the
    pin layer populated, for rendering network inputs.
    '''
    plane = np.asarray(plane, dtype=np.uint8)
    planes = np.zeros((LAYER_COUNT,) + plane.shape[1:], dtype=np.uint8)
    planes[LayerId.PIN] = plane[0]
    return LayoutGrid(planes)
