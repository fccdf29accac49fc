'''
Design-rule and connectivity checker.

The rules are the orientation rules (odd metals vertical, even metals
horizontal), via support (``Via_n`` sits between ``M_n`` and ``M_n+1``) and
a single connected route covering every pin.
'''
from collections import namedtuple
import logging

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .layout import (
    HORIZONTAL_METALS,
    METAL_LAYERS,
    VERTICAL_METALS,
    VIA_PLATES,
    LayerId,
    PinSet,
)

_LOGGER = logging.getLogger(__name__)

RULE_ORTHOGONALITY = 'orthogonality'
RULE_VIA_SUPPORT = 'via-support'
RULE_CONNECTIVITY = 'connectivity'
RULE_PIN_COVERAGE = 'pin-coverage'

DrcViolation = namedtuple('DrcViolation', ['rule', 'layer', 'coordinate', 'message'])


class DrcReport(namedtuple('DrcReport', ['violations'])):
    '''
    The outcome of :py:func:`run_drc`.

    :ivar tuple violations: :py:class:`DrcViolation` records in check order.
    '''
    __slots__ = ()

    @property
    def passed(self):
        return not self.violations

    def __str__(self):
        if self.passed:
            return 'PASS'
        return 'FAIL ({0} violations): {1}'.format(
            len(self.violations),
            '; '.join(violation.message for violation in self.violations)
        )


def _misoriented_runs(plane):
    '''
    Yield ``(row, start, length)`` for every run of >= 2 active pixels along
    axis 1 in which some pixel has no active neighbour along axis 0.
    '''
    support = np.zeros_like(plane)
    support[1:] |= plane[:-1]
    support[:-1] |= plane[1:]
    support &= plane
    for row in range(plane.shape[0]):
        padded = np.concatenate(([False], plane[row], [False]))
        edges = np.flatnonzero(padded[1:] != padded[:-1])
        for start, stop in zip(edges[::2], edges[1::2]):
            if stop - start >= 2 and not support[row, start:stop].all():
                yield row, int(start), int(stop - start)


def check_orthogonality(grid):
    '''
    Flag wires that run against their layer's direction: a horizontal run of
    two or more pixels on M3/M5, or a vertical run on M4/M6, unless every
    pixel of the run continues along the legal direction. Isolated pixels
    are legal on every metal.

    :param LayoutGrid grid: The layout to check.
    :rtype: list(DrcViolation)
    '''
    violations = []
    for layer in METAL_LAYERS:
        vertical = layer in VERTICAL_METALS
        plane = grid.active(layer)
        for row, start, length in _misoriented_runs(plane if vertical else plane.T):
            coordinate = (start, row) if vertical else (row, start)
            violations.append(DrcViolation(
                RULE_ORTHOGONALITY,
                layer,
                coordinate,
                '{0} run of {1} pixels at {2} on {3} layer {4}'.format(
                    'horizontal' if vertical else 'vertical',
                    length,
                    coordinate,
                    'vertical' if vertical else 'horizontal',
                    layer.name,
                ),
            ))
    return violations


def check_via_support(grid):
    '''
    Every active ``Via_n`` pixel needs both ``M_n`` and ``M_n+1`` at the same
    position; each missing plate is one violation.

    :rtype: list(DrcViolation)
    '''
    violations = []
    for via, plates in sorted(VIA_PLATES.items()):
        for y, x in np.argwhere(grid.active(via)):
            for plate in plates:
                if not grid.planes[plate, y, x]:
                    coordinate = (int(x), int(y))
                    violations.append(DrcViolation(
                        RULE_VIA_SUPPORT,
                        via,
                        coordinate,
                        '{0} at {1} has no {2} plate'.format(via.name, coordinate, plate.name),
                    ))
    return violations


def _route_graph(grid):
    metals = np.stack([grid.active(layer) for layer in METAL_LAYERS])
    ids = np.full(metals.shape, -1, dtype=np.int64)
    count = int(metals.sum())
    ids[metals] = np.arange(count)

    heads, tails = [], []
    for index, layer in enumerate(METAL_LAYERS):
        active = metals[index]
        if layer in VERTICAL_METALS:
            pairs = active[:-1, :] & active[1:, :]
            heads.append(ids[index, :-1, :][pairs])
            tails.append(ids[index, 1:, :][pairs])
        else:
            pairs = active[:, :-1] & active[:, 1:]
            heads.append(ids[index, :, :-1][pairs])
            tails.append(ids[index, :, 1:][pairs])

    for via, (lower, upper) in VIA_PLATES.items():
        lower_index = METAL_LAYERS.index(lower)
        upper_index = METAL_LAYERS.index(upper)
        joined = grid.active(via) & metals[lower_index] & metals[upper_index]
        heads.append(ids[lower_index][joined])
        tails.append(ids[upper_index][joined])

    heads = np.concatenate(heads)
    tails = np.concatenate(tails)
    graph = coo_matrix(
        (np.ones(len(heads), dtype=np.int8), (heads, tails)),
        shape=(count, count),
    )
    return metals, ids, graph


def check_connectivity(grid, pins):
    '''
    Verify the route forms one connected component and touches every pin.

    Route pixels on M3..M6 are joined to same-layer neighbours along the
    layer's legal direction and to the pixel directly above or below when the
    via between them is active. Every component beyond the first is one
    violation, as is every pin with no metal at its position.

    :param LayoutGrid grid: The layout to check.
    :param pins: A :py:class:`~netroute.layout.PinSet` or ``(x, y)`` pairs.
    :rtype: list(DrcViolation)
    '''
    pins = pins if isinstance(pins, PinSet) else PinSet(pins)
    pins.validate(grid.dims)

    violations = []
    metals, ids, graph = _route_graph(grid)
    if graph.shape[0]:
        ncomponents, labels = connected_components(graph, directed=False)
        if ncomponents > 1:
            for component in range(1, ncomponents):
                node = int(np.flatnonzero(labels == component)[0])
                index, y, x = (int(value[0]) for value in np.nonzero(ids == node))
                coordinate = (x, y)
                violations.append(DrcViolation(
                    RULE_CONNECTIVITY,
                    METAL_LAYERS[index],
                    coordinate,
                    'route component {0} of {1} (at {2} on {3}) is disconnected'.format(
                        component + 1, ncomponents, coordinate, METAL_LAYERS[index].name
                    ),
                ))

    covered = metals.any(axis=0)
    for x, y in pins:
        if not covered[y, x]:
            violations.append(DrcViolation(
                RULE_PIN_COVERAGE,
                LayerId.PIN,
                (x, y),
                'pin {0} is not covered by any metal'.format((x, y)),
            ))
    return violations


def run_drc(grid, pins):
    '''
    Run every check.

    :param LayoutGrid grid: The layout to check.
    :param pins: The net's pins.
    :rtype: DrcReport
    '''
    report = DrcReport(tuple(
        check_orthogonality(grid) +
        check_via_support(grid) +
        check_connectivity(grid, pins)
    ))
    if not report.passed:
        _LOGGER.debug('DRC failed: %s', report)
    return report
