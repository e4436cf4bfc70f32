"""Series operations that never change temporal resolution.

Scalar reductions, successive-difference calculus, pointwise rescaling,
trailing moving averages, label filtering, slicing and multi-series merging.
Every series returned here keeps the kind, the resolution and the zone of
its input; resolution changes belong to the transform module.
"""

from __future__ import annotations

import math
from statistics import fmean

from .core import DataTimePoint, DataTimeSlot, TimeSeries
from .errors import ConsistencyError, ResolutionError
from .timeunit import TimeUnit


def _require(series, n=1, what='operation'):
    if len(series) < n:
        raise ConsistencyError(f'{what} needs at least {n} element(s), '
                               f'series has {len(series)}')


def _like(element, data, indexes=None):
    # Same element, different payload. Indexes default to a copy.
    if indexes is None:
        indexes = dict(element.indexes)
    if isinstance(element, DataTimeSlot):
        return DataTimeSlot(element.start, element.end, data, indexes, element.unit)
    return DataTimePoint(element.t, data, indexes)


def _rebuild(series, elements):
    return TimeSeries._build(elements, series.tzinfo, series.resolution)


#=============================
#  Scalar reductions
#=============================

def _reduce(series, label, combine):
    _require(series, 1, 'a scalar statistic')
    picked = series.labels if label is None else [label]
    missing = [one for one in picked if one not in series.labels]
    if missing:
        raise KeyError(f'no such label(s) {missing}: available {series.labels}')
    result = {one: combine([element.data[one] for element in series])
              for one in picked}
    if label is not None:
        return result[label]
    return result


def s_min(series, label=None):
    """Per-label minimum; a scalar if a label is given, else a dict."""
    return _reduce(series, label, min)


def s_max(series, label=None):
    """Per-label maximum; a scalar if a label is given, else a dict."""
    return _reduce(series, label, max)


def avg(series, label=None):
    """Per-label unweighted arithmetic mean over the elements."""
    return _reduce(series, label, fmean)


def s_sum(series, label=None):
    """Per-label sum over the elements."""
    return _reduce(series, label, sum)


#=============================
#  Calculus
#=============================

def diff(series):
    """Successive differences. One element shorter, timestamped on the
    second element of each pair."""
    _require(series, 2, 'diff')
    elements = list(series)
    out = []
    for prior, element in zip(elements, elements[1:]):
        data = {label: element.data[label] - prior.data[label]
                for label in element.data}
        out.append(_like(element, data))
    return _rebuild(series, out)


def csum(series):
    """Running sum, same length and timestamps as the input."""
    _require(series, 1, 'csum')
    totals = None
    out = []
    for element in series:
        if totals is None:
            totals = dict(element.data)
        else:
            totals = {label: totals[label] + element.data[label]
                      for label in element.data}
        out.append(_like(element, dict(totals)))
    return _rebuild(series, out)


def _require_fixed_resolution(series, what):
    if not isinstance(series.resolution, TimeUnit):
        raise ResolutionError(
            f'{what} needs a fixed resolution, this series has '
            f'{series.resolution} (resample first)')


def derivative(series):
    """Rate of change per second: successive differences divided by the
    actual duration between the elements. One element shorter."""
    _require(series, 2, 'derivative')
    _require_fixed_resolution(series, 'derivative')
    elements = list(series)
    out = []
    for prior, element in zip(elements, elements[1:]):
        span = element.t - prior.t
        data = {label: (element.data[label] - prior.data[label]) / span
                for label in element.data}
        out.append(_like(element, data))
    return _rebuild(series, out)


def integral(series):
    """Running trapezoidal integral of value dt, starting at zero."""
    _require(series, 2, 'integral')
    _require_fixed_resolution(series, 'integral')
    elements = list(series)
    totals = {label: 0.0 for label in elements[0].data}
    out = [_like(elements[0], dict(totals))]
    for prior, element in zip(elements, elements[1:]):
        span = element.t - prior.t
        for label in totals:
            totals[label] += (prior.data[label] + element.data[label]) / 2.0 * span
        out.append(_like(element, dict(totals)))
    return _rebuild(series, out)


#=============================
#  Pointwise
#=============================

def normalize(series):
    """Map every label linearly onto [0, 1] over the series extent."""
    _require(series, 1, 'normalize')
    lows = s_min(series)
    highs = s_max(series)
    for label in series.labels:
        if highs[label] == lows[label]:
            raise ConsistencyError(
                f'cannot normalize label "{label}": constant value '
                f'{lows[label]} gives a zero range')
    out = []
    for element in series:
        data = {label: (value - lows[label]) / (highs[label] - lows[label])
                for label, value in element.data.items()}
        out.append(_like(element, data))
    return _rebuild(series, out)


def offset(series, amount):
    """Add a constant to every value."""
    if not math.isfinite(amount):
        raise ValueError(f'offset amount must be finite, got {amount}')
    out = [_like(element, {label: value + amount
                           for label, value in element.data.items()})
           for element in series]
    return _rebuild(series, out)


def rescale(series, factor):
    """Multiply every value by a constant."""
    if not math.isfinite(factor):
        raise ValueError(f'rescale factor must be finite, got {factor}')
    out = [_like(element, {label: value * factor
                           for label, value in element.data.items()})
           for element in series]
    return _rebuild(series, out)


#=============================
#  Moving average
#=============================

def mavg(series, window):
    """Trailing moving average over `window` elements.

    The output is window-1 elements shorter and starts at the window-th
    element's timestamp, so every value only looks backwards.
    """
    if not isinstance(window, int) or isinstance(window, bool) or window < 1:
        raise ValueError(f'mavg window must be a positive integer, got {window!r}')
    if window > len(series):
        raise ValueError(f'mavg window {window} exceeds series length {len(series)}')
    elements = list(series)
    labels = series.labels
    sums = {label: 0.0 for label in labels}
    out = []
    for i, element in enumerate(elements):
        for label in labels:
            sums[label] += element.data[label]
        if i >= window:
            dropped = elements[i - window]
            for label in labels:
                sums[label] -= dropped.data[label]
        if i >= window - 1:
            out.append(_like(element, {label: sums[label] / window
                                       for label in labels}))
    return _rebuild(series, out)


#=============================
#  Merge
#=============================

def merge(*series_list):
    """Join two or more same-grid series into one multi-label series.

    The inputs must share kind, resolution and zone, carry disjoint label
    sets and overlap in time; the output spans the intersection of their
    ranges. A data_loss index present in several inputs merges as the
    maximum; any other index name carried by several inputs stays merged
    while the values agree and splits into "<name>_<i>" (1-based input
    position) where they diverge.
    """
    if len(series_list) < 2:
        raise ConsistencyError('merge needs at least two series')
    base = series_list[0]
    for other in series_list[1:]:
        if other.kind != base.kind or base.kind == 'empty':
            raise ConsistencyError(
                f'can only merge non-empty series of one kind, '
                f'got {[s.kind for s in series_list]}')
        if other.resolution != base.resolution:
            raise ResolutionError(
                f'resolution mismatch in merge: {base.resolution} vs '
                f'{other.resolution}')
        if other.tz != base.tz:
            raise ConsistencyError(
                f'timezone mismatch in merge: "{base.tz}" vs "{other.tz}"')

    seen = set()
    duplicates = set()
    for one in series_list:
        for label in one.labels:
            if label in seen:
                duplicates.add(label)
            seen.add(label)
    if duplicates:
        raise ConsistencyError(
            f'label collision in merge, duplicated: {sorted(duplicates)}')

    t_from = max(one[0].t for one in series_list)
    t_to = min(one[-1].t for one in series_list)
    if t_from > t_to:
        raise ConsistencyError('series time ranges do not overlap')
    rows = []
    for one in series_list:
        rows.append([element for element in one if t_from <= element.t <= t_to])
    if len({len(row) for row in rows}) != 1:
        raise ConsistencyError(
            'series grids differ inside the merged range (merge does not '
            'align or resample)')

    # Index naming plan: which inputs carry which index, and whether values
    # actually diverge anywhere in the merged range.
    owners = {}
    for ordinal, one in enumerate(series_list):
        for name in one.index_names:
            owners.setdefault(name, []).append(ordinal)
    aligned = list(zip(*rows))
    divergent = set()
    for name, holders in owners.items():
        if name == 'data_loss' or len(holders) == 1:
            continue
        for row in aligned:
            values = {row[o].indexes[name] for o in holders if name in row[o].indexes}
            if len(values) > 1:
                divergent.add(name)
                break

    out = []
    for row in aligned:
        t0 = row[0].t
        for element in row[1:]:
            if element.t != t0:
                raise ConsistencyError(
                    'series grids differ inside the merged range (merge does '
                    'not align or resample)')
        if base.kind == 'slots' and len({element.end for element in row}) != 1:
            raise ConsistencyError('slot boundaries differ inside the merged range')
        data = {}
        for element in row:
            data.update(element.data)
        indexes = {}
        for name, holders in owners.items():
            defined = [(o, row[o].indexes[name]) for o in holders
                       if name in row[o].indexes]
            if not defined:
                continue
            if name == 'data_loss' and len(holders) > 1:
                indexes[name] = max(value for _, value in defined)
            elif name in divergent:
                for o, value in defined:
                    indexes[f'{name}_{o + 1}'] = value
            else:
                indexes[name] = defined[0][1]
        if base.kind == 'slots':
            out.append(DataTimeSlot(t0, row[0].end, data, indexes, row[0].unit))
        else:
            out.append(DataTimePoint(t0, data, indexes))
    return _rebuild(base, out)


#=============================
#  Selection
#=============================

def filter(series, *labels):
    """Keep only the named labels (indexes travel along)."""
    return series.filter(*labels)


def slice(series, from_selector, to_selector):
    """Half-open sub-range [from, to): positions if ints, else timestamps."""
    if from_selector is not None and to_selector is not None:
        try:
            inverted = not from_selector < to_selector
        except TypeError:
            inverted = False
        if inverted:
            raise ValueError(
                f'inverted slice range: from={from_selector!r} is not before '
                f'to={to_selector!r}')
    return series.slice(from_selector, to_selector)
