'''
Deterministic branch-leg router.

A net is routed with one straight branch along its dominant direction and
one perpendicular leg per off-branch pin. The pair of metals used for the
branch and legs (the wire class combination) is picked by minimizing a
wire-plus-via resistance cost over the route's Manhattan length.
'''
from collections import namedtuple
import enum

import numpy as np

from ._errors import InternalError, ValidationError
from .layout import GridDims, LayerId, LayoutGrid, PinSet, encode_pins


class Axis(enum.Enum):
    HORIZONTAL = 'horizontal'
    VERTICAL = 'vertical'


class WireClassCombo(enum.IntEnum):
    '''
    Adjacent metal pairs available to a route, lowest first.
    '''
    M3M4 = 0
    M4M5 = 1
    M5M6 = 2

    @property
    def vertical_metal(self):
        return _COMBO_LAYERS[self][0]

    @property
    def horizontal_metal(self):
        return _COMBO_LAYERS[self][1]

    @property
    def via(self):
        return _COMBO_LAYERS[self][2]

    def branch_metal(self, axis):
        return self.horizontal_metal if axis is Axis.HORIZONTAL else self.vertical_metal

    def leg_metal(self, axis):
        return self.vertical_metal if axis is Axis.HORIZONTAL else self.horizontal_metal


# (vertical metal, horizontal metal, via)
_COMBO_LAYERS = {
    WireClassCombo.M3M4: (LayerId.M3, LayerId.M4, LayerId.VIA3),
    WireClassCombo.M4M5: (LayerId.M5, LayerId.M4, LayerId.VIA4),
    WireClassCombo.M5M6: (LayerId.M5, LayerId.M6, LayerId.VIA5),
}


class ResistanceModel(namedtuple('ResistanceModel', ['rates', 'overheads'])):
    '''
    Per-combination resistance cost ``rate * length + overhead``.

    :param rates: Resistance per pixel of route for each
        :py:class:`WireClassCombo`; strictly decreasing.
    :param overheads: Fixed resistance for each combination (via jumps);
        non-negative and strictly increasing.
    '''
    __slots__ = ()

    DEFAULT_RATES = (1.0, 0.5, 0.25)
    DEFAULT_OVERHEADS = (0.0, 5.5, 11.0)

    def __new__(cls, rates=DEFAULT_RATES, overheads=DEFAULT_OVERHEADS):
        rates = tuple(float(rate) for rate in rates)
        overheads = tuple(float(overhead) for overhead in overheads)
        if len(rates) != len(WireClassCombo) or len(overheads) != len(WireClassCombo):
            raise ValidationError('resistance model needs one rate and one overhead per wire class')
        if not all(lower > upper for lower, upper in zip(rates, rates[1:])) or rates[-1] <= 0:
            raise ValidationError('rates must be positive and strictly decreasing, got {0}'.format(rates))
        if overheads[0] < 0 or not all(lower < upper for lower, upper in zip(overheads, overheads[1:])):
            raise ValidationError(
                'overheads must be non-negative and strictly increasing, got {0}'.format(overheads)
            )
        return super(ResistanceModel, cls).__new__(cls, rates, overheads)

    @classmethod
    def balanced(cls):
        '''
        A model whose break-even lengths (30 and 45 pixels) sit at the
        tertiles of the route length distribution of uniformly sampled 32x32
        nets, so each combination routes about a third of a generated
        dataset.
        '''
        return cls(rates=(1.0, 0.5, 0.25), overheads=(0.0, 15.0, 26.25))

    def cost(self, combo, length):
        return self.rates[combo] * length + self.overheads[combo]

    def break_even(self, lower, upper):
        '''
        The route length at which `upper` becomes as cheap as `lower`.
        '''
        return (self.overheads[upper] - self.overheads[lower]) / (self.rates[lower] - self.rates[upper])


Leg = namedtuple('Leg', ['coord', 'span'])
Leg.__doc__ = '''\
A leg at dominant-axis coordinate `coord` covering the inclusive span
`span` (lo, hi) along the other axis; one end is on the branch track.
'''


class RoutePlan(namedtuple('RoutePlan', ['axis', 'branch_coord', 'branch_span', 'legs', 'total_length'])):
    '''
    Route geometry before metal assignment.

    :ivar Axis axis: The dominant direction (the branch's direction).
    :ivar int branch_coord: Row of a horizontal branch, column of a vertical one.
    :ivar tuple branch_span: Inclusive ``(lo, hi)`` along the dominant axis.
    :ivar tuple legs: One :py:class:`Leg` per off-branch pin, in pin order.
    :ivar int total_length: Manhattan length of branch plus legs, in pixels.
    '''
    __slots__ = ()


def _leg_length(leg):
    return leg.span[1] - leg.span[0]


def _split(pins, axis):
    '''Return (dominant, non-dominant) coordinates of each pin.'''
    if axis is Axis.HORIZONTAL:
        return pins.xs, pins.ys
    return pins.ys, pins.xs


def dominant_axis(pins):
    '''
    The direction with the larger pin spread; ties go to
    :py:attr:`Axis.HORIZONTAL`.

    :rtype: Axis
    '''
    xs, ys = pins.xs, pins.ys
    if max(xs) - min(xs) >= max(ys) - min(ys):
        return Axis.HORIZONTAL
    return Axis.VERTICAL


def plan_geometry(pins):
    '''
    Lay out the branch and legs for `pins`.

    The branch track is the lower median of the pins' non-dominant
    coordinates, which minimizes total leg length.

    :param pins: A :py:class:`~netroute.layout.PinSet`.
    :rtype: RoutePlan
    '''
    pins = pins if isinstance(pins, PinSet) else PinSet(pins)
    axis = dominant_axis(pins)
    dominant, other = _split(pins, axis)
    branch_coord = sorted(other)[(len(other) - 1) // 2]
    branch_span = (min(dominant), max(dominant))
    legs = tuple(
        Leg(coord, (min(branch_coord, value), max(branch_coord, value)))
        for coord, value in zip(dominant, other)
        if value != branch_coord
    )
    total_length = (branch_span[1] - branch_span[0]) + sum(_leg_length(leg) for leg in legs)
    return RoutePlan(axis, branch_coord, branch_span, legs, total_length)


def choose_combo(total_length, model=None):
    '''
    The wire class combination with the least cost for a route of
    `total_length` pixels; ties go to the lower combination.

    :param int total_length: Route length, at least 1.
    :param ResistanceModel model: Defaults to :py:class:`ResistanceModel()`.
    :rtype: WireClassCombo
    '''
    if total_length < 1:
        raise ValidationError('route length must be >= 1, got {0}'.format(total_length))
    model = model or ResistanceModel()
    return min(WireClassCombo, key=lambda combo: (model.cost(combo, total_length), combo))


def _check_plan(plan, pins):
    lo, hi = plan.branch_span
    dominant, other = _split(pins, plan.axis)
    endpoints = set()
    for leg in plan.legs:
        if not lo <= leg.coord <= hi or not leg.span[0] <= plan.branch_coord <= leg.span[1]:
            raise InternalError('leg {0} does not meet the branch of {1}'.format(leg, plan))
        endpoints.update(
            (leg.coord, end) for end in leg.span if end != plan.branch_coord
        )
    for coord, value in zip(dominant, other):
        on_branch = value == plan.branch_coord and lo <= coord <= hi
        if not on_branch and (coord, value) not in endpoints:
            raise InternalError('pin at {0} is not reached by {1}'.format((coord, value), plan))


def materialize(plan, combo, pins, dims=None):
    '''
    Draw a planned route on the metals of `combo`.

    The branch goes on the combination's metal matching the branch
    orientation and the legs on the other metal; a via joins each leg to the
    branch.

    :rtype: ~netroute.layout.LayoutGrid
    :raises netroute.InternalError: If the plan does not connect `pins`.
    '''
    dims = dims or GridDims()
    pins = pins if isinstance(pins, PinSet) else PinSet(pins)
    _check_plan(plan, pins)

    planes = np.zeros((len(LayerId), dims.height, dims.width), dtype=np.uint8)
    planes[LayerId.PIN] = encode_pins(pins, dims)[0]

    branch = planes[combo.branch_metal(plan.axis)]
    legs = planes[combo.leg_metal(plan.axis)]
    vias = planes[combo.via]
    lo, hi = plan.branch_span
    if plan.axis is Axis.HORIZONTAL:
        branch[plan.branch_coord, lo:hi + 1] = 1
        for leg in plan.legs:
            legs[leg.span[0]:leg.span[1] + 1, leg.coord] = 1
            vias[plan.branch_coord, leg.coord] = 1
    else:
        branch[lo:hi + 1, plan.branch_coord] = 1
        for leg in plan.legs:
            legs[leg.coord, leg.span[0]:leg.span[1] + 1] = 1
            vias[leg.coord, plan.branch_coord] = 1
    return LayoutGrid(planes)


def route(pins, model=None, dims=None):
    '''
    Route a net end to end: plan, choose the wire classes, draw.

    :param pins: A :py:class:`~netroute.layout.PinSet` or ``(x, y)`` pairs.
    :param ResistanceModel model: The cost model.
    :param GridDims dims: The grid size. Defaults to 32x32.
    :rtype: ~netroute.layout.LayoutGrid
    '''
    dims = dims or GridDims()
    pins = (pins if isinstance(pins, PinSet) else PinSet(pins)).validate(dims)
    plan = plan_geometry(pins)
    combo = choose_combo(plan.total_length, model)
    return materialize(plan, combo, pins, dims)
