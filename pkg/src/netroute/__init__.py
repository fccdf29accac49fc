'''
*netroute* routes single nets on a multi-layer pixel grid and trains a
fully convolutional network, written directly on `numpy`, to predict those
routes from pin locations.
'''
import logging

from ._errors import (
    AcceptanceError,
    Error,
    FormatError,
    InternalError,
    NumericalError,
    ShapeError,
    ValidationError,
)
from .layout import (
    GridDims,
    LayerId,
    LayoutGrid,
    PinSet,
    RgbImage,
    decode_to_rgb,
    encode_pins,
    pack_cell,
    unpack_cell,
)
from .drc import DrcReport, DrcViolation, run_drc
from .router import ResistanceModel, WireClassCombo, route

version_info = (1, 0, 0) # pylint: disable=invalid-name

# Configure a NullHandler for library logging.
# See https://docs.python.org/3/howto/logging.html#library-config.
logging.getLogger(__name__).addHandler(logging.NullHandler())

# Define the library version, in major.minor.patch format.
__version__ = '.'.join(str(item) for item in version_info) # pylint: disable=invalid-name
