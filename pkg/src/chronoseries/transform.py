"""Series transformations: resampling to points, aggregating to slots.

Both transformations share one coverage model. Every source element is valid
over a region of time; a target element's window is compared against those
regions to compute how much of it is backed by source data. The data_loss
index of each produced element is the uncovered (or lost-at-source) fraction
of its window, and values for uncovered stretches are imputed by
interpolation between the nearest valid elements.

Resampled points are centered estimates: a source point is valid for half the
sampling interval on each side, clipped to its neighbors, and a target point
at t owns the window [t - T/2, t + T/2]. Aggregated slots instead integrate
the interval each sample opens: a source point is valid from its timestamp
until the next sample (at most one interval), so a slot consumes exactly the
samples whose timestamps fall inside it.
"""

from __future__ import annotations

import logging
import math

from .core import DataTimePoint, DataTimeSlot, TimeSeries
from .errors import ConsistencyError, ResolutionError
from .timeunit import TimeUnit

logger = logging.getLogger(__name__)

_EPS = 1e-6

_AGGREGATE_OPERATIONS = ('avg', 'min', 'max', 'sum')


#=============================
#  Coverage machinery
#=============================

def _centered_validities(elements, delta):
    half = delta / 2.0
    validities = []
    n = len(elements)
    for i, element in enumerate(elements):
        left = element.t - half
        right = element.t + half
        if i > 0:
            left = max(left, (elements[i - 1].t + element.t) / 2.0)
        if i < n - 1:
            right = min(right, (element.t + elements[i + 1].t) / 2.0)
        validities.append((left, right))
    return validities


def _left_edge_validities(elements, delta):
    validities = []
    n = len(elements)
    for i, element in enumerate(elements):
        right = element.t + delta
        if i < n - 1:
            right = min(right, elements[i + 1].t)
        validities.append((element.t, right))
    return validities


def _slot_validities(elements):
    return [(element.start, element.end) for element in elements]


def _element_loss(element):
    return element.indexes.get('data_loss', 0.0)


def _window_pieces(elements, validities, w0, w1, start_hint=0):
    """Split [w0, w1] into covered pieces (element index attached) and gaps.

    Returns (pieces, gaps, next_hint) where pieces is a list of
    (a, b, element_index) and gaps a list of (a, b). The hint lets callers
    sweep consecutive windows in linear time.
    """
    i = start_hint
    # Rewind if the caller's hint overshot (windows can overlap).
    while i > 0 and validities[i - 1][1] > w0:
        i -= 1
    while i < len(validities) and validities[i][1] <= w0:
        i += 1
    next_hint = i
    pieces = []
    gaps = []
    cursor = w0
    j = i
    while j < len(validities) and validities[j][0] < w1:
        v0, v1 = validities[j]
        a = max(v0, cursor)
        b = min(v1, w1)
        if a > cursor:
            gaps.append((cursor, a))
        if b > a:
            pieces.append((a, b, j))
        cursor = max(cursor, b)
        if v1 >= w1:
            break
        j += 1
    if cursor < w1:
        gaps.append((cursor, w1))
    return pieces, gaps, next_hint


def _interpolator(elements, interpolation):
    """Callable (t, around_index) -> per-label dict, imputing from the
    nearest elements that are not fully lost."""
    if interpolation not in ('linear', 'previous'):
        raise ValueError(f'unknown interpolation "{interpolation}": '
                         f'use "linear" or "previous"')
    labels = list(elements[0].data)

    def nearest_valid(index, direction):
        i = index
        while 0 <= i < len(elements):
            if _element_loss(elements[i]) < 1.0:
                return elements[i]
            i += direction
        return None

    def at(t, around):
        # `around` is the index of the element just before the gap.
        left = nearest_valid(min(around, len(elements) - 1), -1)
        right = nearest_valid(min(around + 1, len(elements) - 1), +1)
        if left is None and right is None:
            # Degenerate: everything is lost, fall back to raw neighbors.
            left = elements[min(around, len(elements) - 1)]
            right = left
        if left is None:
            left = right
        if right is None or interpolation == 'previous':
            right = left
        if right.t == left.t:
            return dict(left.data)
        w = (t - left.t) / (right.t - left.t)
        return {label: left.data[label] + w * (right.data[label] - left.data[label])
                for label in labels}

    return at


def carry_indexes(elements, overlaps):
    """Combine source element indexes into one target DataIndexes dict.

    Every index present on any source (except data_loss, which targets
    recompute from coverage) becomes the overlap-weighted mean over the
    sources that define it. An index no source in reach defines stays absent.

    Args:
        elements: source elements overlapping the target window.
        overlaps: matching list of overlap durations (seconds).
    """
    names = []
    for element in elements:
        for name in element.indexes:
            if name != 'data_loss' and name not in names:
                names.append(name)
    carried = {}
    for name in names:
        weight_sum = 0.0
        value_sum = 0.0
        for element, overlap in zip(elements, overlaps):
            if name in element.indexes and overlap > 0:
                weight_sum += overlap
                value_sum += element.indexes[name] * overlap
        if weight_sum > 0:
            carried[name] = min(1.0, max(0.0, value_sum / weight_sum))
    return carried


def _clamp01(value):
    return min(1.0, max(0.0, value))


#=============================
#  Resampling
#=============================

def resample(series, unit, interpolation='linear'):
    """Resample a point series onto a regular grid of the given unit.

    Target points sit at epoch-aligned multiples of the unit (UTC floor
    alignment) and are emitted only where their whole window lies inside the
    time covered by the source, so no edge value is ever extrapolated. Each
    target's data_loss is the fraction of its window not backed by observed
    data; fully uncovered windows are still emitted, with interpolated
    values and data_loss 1.0.

    Args:
        series: a point TimeSeries with at least two elements.
        unit: physical TimeUnit (or string). Calendar units belong to
            aggregate().
        interpolation: "linear" (default) or "previous", used to impute
            uncovered stretches.
    """
    unit = TimeUnit(unit)
    if unit.is_calendar:
        raise ResolutionError(
            f'cannot resample to calendar unit "{unit}": calendar spans vary, '
            f'use aggregate() instead')
    if series.kind == 'slots':
        raise ConsistencyError('resample works on point series, not slots')
    if len(series) < 2:
        raise ConsistencyError('resample needs at least two points')

    elements = list(series)
    delta = series.auto_interval()
    logger.info('Using auto-detected sampling interval: %ss', float(delta))
    period = unit.seconds
    half = period / 2.0
    validities = _centered_validities(elements, delta)
    covered_start = elements[0].t - delta / 2.0
    covered_end = elements[-1].t + delta / 2.0

    k_first = math.ceil((covered_start + half - _EPS) / period)
    k_last = math.floor((covered_end - half + _EPS) / period)

    interpolate = _interpolator(elements, interpolation)
    labels = series.labels
    points = []
    hint = 0
    for k in range(k_first, k_last + 1):
        t = k * period
        w0, w1 = t - half, t + half
        pieces, gaps, hint = _window_pieces(elements, validities, w0, w1, hint)

        covered = 0.0
        effective = 0.0
        sums = {label: 0.0 for label in labels}
        for a, b, i in pieces:
            span = b - a
            covered += span
            effective += span * (1.0 - _element_loss(elements[i]))
            for label in labels:
                sums[label] += elements[i].data[label] * span
        for a, b in gaps:
            fill = interpolate((a + b) / 2.0, _gap_anchor(elements, a))
            for label in labels:
                sums[label] += fill[label] * (b - a)

        data = {label: sums[label] / period for label in labels}
        indexes = carry_indexes([elements[i] for _, _, i in pieces],
                                [b - a for a, b, _ in pieces])
        data_loss = _clamp01(1.0 - effective / period)
        if data_loss > 0 or any('data_loss' in elements[i].indexes for _, _, i in pieces):
            indexes['data_loss'] = data_loss
        else:
            indexes['data_loss'] = 0.0
        points.append(DataTimePoint(t, data, indexes))

    logger.info('Resampled %s DataTimePoints in %s DataTimePoints',
                len(elements), len(points))
    return TimeSeries._build(points, series.tzinfo, unit)


def _gap_anchor(elements, gap_start):
    # Index of the last element whose timestamp is at or before the gap.
    lo, hi = 0, len(elements) - 1
    anchor = 0
    while lo <= hi:
        mid = (lo + hi) // 2
        if elements[mid].t <= gap_start:
            anchor = mid
            lo = mid + 1
        else:
            hi = mid - 1
    return anchor


#=============================
#  Aggregation
#=============================

def aggregate(series, unit, operations=None, interpolation='linear'):
    """Aggregate a series into calendar-aware slots of the given unit.

    Slot boundaries are floor-aligned in the series timezone, so daily slots
    start at local midnight and honor DST (a spring-forward day yields a
    23-hour slot). Only complete slots are emitted: a leading partial slot is
    discarded, and a trailing slot is kept only when the data runs exactly to
    its end or extends a full unit past it. Each slot's data_loss is the
    fraction of its span not backed by observed data.

    Args:
        series: a point or slot TimeSeries with at least two elements.
        unit: TimeUnit (or string), calendar or physical.
        operations: list among "avg", "min", "max", "sum" (default ["avg"]).
            With operations other than the single default avg, output labels
            are suffixed "_<op>".
    """
    unit = TimeUnit(unit)
    if len(series) < 2:
        raise ConsistencyError('aggregate needs at least two elements')
    if operations is None:
        operations = ['avg']
    if not operations:
        raise ValueError('operations must not be empty')
    for operation in operations:
        if operation not in _AGGREGATE_OPERATIONS:
            raise ValueError(f'unknown aggregation operation "{operation}": '
                             f'choose among {", ".join(_AGGREGATE_OPERATIONS)}')
    suffix_labels = list(operations) != ['avg']

    elements = list(series)
    slots_in = series.kind == 'slots'
    if slots_in:
        if 'sum' in operations:
            raise ValueError('sum is not defined when aggregating slots: '
                             'slot values are aggregates already')
        delta = None
        validities = _slot_validities(elements)
        first_t = elements[0].start
        covered_end = elements[-1].end
    else:
        delta = series.auto_interval()
        logger.info('Using auto-detected sampling interval: %ss', float(delta))
        validities = _left_edge_validities(elements, delta)
        first_t = elements[0].t
        covered_end = elements[-1].t + delta

    tzinfo = series.tzinfo
    last_t = elements[-1].t

    # Build the boundary chain from the floor of the first element.
    boundary = unit.floor(first_t, tzinfo)
    slots_out = []
    consumed_until = None
    interpolate = _interpolator(elements, interpolation)
    labels = series.labels
    hint = 0
    while boundary <= last_t + _EPS:
        start = boundary
        end = unit.shift(start, tzinfo)
        boundary = end
        if start < first_t - _EPS:
            continue
        if slots_in:
            emit = end <= covered_end + _EPS
        else:
            emit = (unit.shift(end, tzinfo) <= last_t + _EPS
                    or abs(end - covered_end) < _EPS)
        if not emit:
            continue

        pieces, gaps, hint = _window_pieces(elements, validities, start, end, hint)
        span = end - start
        covered = 0.0
        effective = 0.0
        sums = {label: 0.0 for label in labels}
        extremes = {label: [] for label in labels}
        for a, b, i in pieces:
            width = b - a
            covered += width
            effective += width * (1.0 - _element_loss(elements[i]))
            for label in labels:
                value = elements[i].data[label]
                sums[label] += value * width
                extremes[label].append(value)
        for a, b in gaps:
            anchor = _gap_anchor(elements, a)
            fill_mid = interpolate((a + b) / 2.0, anchor)
            fill_a = interpolate(a, anchor)
            fill_b = interpolate(b, anchor)
            for label in labels:
                sums[label] += fill_mid[label] * (b - a)
                extremes[label].extend((fill_a[label], fill_b[label]))

        data = {}
        for label in labels:
            average = sums[label] / span
            for operation in operations:
                if operation == 'avg':
                    value = average
                elif operation == 'min':
                    value = min(extremes[label])
                elif operation == 'max':
                    value = max(extremes[label])
                else:
                    value = average * round(span / delta)
                key = f'{label}_{operation}' if suffix_labels else label
                data[key] = value

        indexes = carry_indexes([elements[i] for _, _, i in pieces],
                                [b - a for a, b, _ in pieces])
        indexes['data_loss'] = _clamp01(1.0 - effective / span)
        slots_out.append(DataTimeSlot(start, end, data, indexes, unit))
        consumed_until = end

    noun_in = 'slots' if slots_in else 'points'
    anchor_of = (lambda e: e.start) if slots_in else (lambda e: e.t)
    consumed = 0
    if consumed_until is not None:
        consumed = sum(1 for element in elements
                       if anchor_of(element) <= consumed_until + _EPS)
    logger.info('Aggregated %s %s in %s slots', consumed, noun_in, len(slots_out))
    return TimeSeries._build(slots_out, tzinfo, unit if slots_out else None)
