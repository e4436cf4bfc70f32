"""Core data structures: points, slots and homogeneous time series."""

from __future__ import annotations

import logging
from collections import Counter
from datetime import datetime
from statistics import median

from .errors import ConsistencyError
from .timeunit import TimeUnit, timezonize, tz_name, format_wallclock

logger = logging.getLogger(__name__)

# Index names with library-wide meaning. Any other name is carried along
# untouched; absence of an index never means zero, it means "not computed".
KNOWN_INDEXES = ('data_loss', 'data_reconstructed', 'forecast', 'anomaly')


class _Variable:
    """Marker for series whose sampling interval is not constant."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'VARIABLE'

    def __str__(self):
        return 'variable'


VARIABLE = _Variable()


#=============================
#  Elements
#=============================

def _validated_data(data) -> dict:
    if not isinstance(data, dict) or not data:
        raise ConsistencyError('element data must be a non-empty dict of label: value')
    clean = {}
    for label, value in data.items():
        if not isinstance(label, str) or not label:
            raise ConsistencyError(f'data labels must be non-empty strings, got {label!r}')
        if ',' in label or '\n' in label:
            raise ConsistencyError(f'data label "{label}" may not contain commas or newlines')
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConsistencyError(f'value for "{label}" must be numeric, got {value!r}')
        if value != value:
            raise ConsistencyError(f'value for "{label}" is NaN; mark losses with the '
                                   f'data_loss index instead')
        clean[label] = float(value)
    return clean


def _validated_indexes(indexes) -> dict:
    if indexes is None:
        return {}
    if not isinstance(indexes, dict):
        raise ConsistencyError('indexes must be a dict of name: value')
    clean = {}
    for name, value in indexes.items():
        if not isinstance(name, str) or not name:
            raise ConsistencyError(f'index names must be non-empty strings, got {name!r}')
        if ',' in name or '\n' in name:
            raise ConsistencyError(f'index name "{name}" may not contain commas or newlines')
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConsistencyError(f'index "{name}" must be numeric, got {value!r}')
        if not 0.0 <= float(value) <= 1.0:
            raise ConsistencyError(f'index "{name}" must lie in [0, 1], got {value}')
        clean[name] = float(value)
    return clean


class DataTimePoint:
    """A payload observed at one instant.

    Args:
        t: epoch timestamp (seconds, UTC-based).
        data: dict mapping data labels to numeric values.
        indexes: optional dict of per-element quality marks in [0, 1]
            (data_loss, data_reconstructed, forecast, anomaly, or custom).
    """

    __slots__ = ('_t', '_data', '_indexes')

    def __init__(self, t, data, indexes=None):
        try:
            self._t = float(t)
        except (TypeError, ValueError):
            raise ConsistencyError(f'point timestamp must be numeric, got {t!r}') from None
        self._data = _validated_data(data)
        self._indexes = _validated_indexes(indexes)

    @property
    def t(self):
        return self._t

    @property
    def data(self):
        return self._data

    @property
    def indexes(self):
        return self._indexes

    def __eq__(self, other):
        if not isinstance(other, DataTimePoint):
            return NotImplemented
        return (self._t == other._t and self._data == other._data
                and self._indexes == other._indexes)

    def __repr__(self):
        return f'DataTimePoint @ {self._t} {self._data}'


class DataTimeSlot:
    """A payload aggregated over an interval [start, end).

    Args:
        start: epoch timestamp where the slot begins.
        end: epoch timestamp where the slot ends (exclusive, > start).
        data: dict mapping data labels to numeric values.
        indexes: optional dict of per-element quality marks in [0, 1].
        unit: the TimeUnit the slot realizes, if known. Calendar units make
            slot spans vary (a "1D" slot lasts 23 or 25 hours across DST).
    """

    __slots__ = ('_start', '_end', '_data', '_indexes', '_unit')

    def __init__(self, start, end, data, indexes=None, unit=None):
        try:
            self._start = float(start)
            self._end = float(end)
        except (TypeError, ValueError):
            raise ConsistencyError('slot start/end must be numeric') from None
        if not self._end > self._start:
            raise ConsistencyError(f'slot end ({end}) must be after start ({start})')
        self._data = _validated_data(data)
        self._indexes = _validated_indexes(indexes)
        self._unit = TimeUnit(unit) if unit is not None else None

    @property
    def start(self):
        return self._start

    @property
    def end(self):
        return self._end

    @property
    def t(self):
        # Anchor timestamp, for uniform handling of points and slots.
        return self._start

    @property
    def duration(self):
        return self._end - self._start

    @property
    def data(self):
        return self._data

    @property
    def indexes(self):
        return self._indexes

    @property
    def unit(self):
        return self._unit

    def __eq__(self, other):
        if not isinstance(other, DataTimeSlot):
            return NotImplemented
        return (self._start == other._start and self._end == other._end
                and self._data == other._data and self._indexes == other._indexes
                and self._unit == other._unit)

    def __repr__(self):
        return f'DataTimeSlot @ [{self._start}, {self._end}) {self._data}'


#=============================
#  Series
#=============================

def detect_resolution(series):
    """Detected resolution of a point series: a TimeUnit if the deltas are
    all equal (and expressible), VARIABLE otherwise."""
    elements = list(series)
    if len(elements) < 2:
        return None
    deltas = [b.t - a.t for a, b in zip(elements, elements[1:])]
    first = deltas[0]
    if all(d == first for d in deltas):
        if first > 0 and first == int(first):
            return TimeUnit.from_seconds(first)
        return VARIABLE
    return VARIABLE


def _auto_interval(deltas):
    # Most frequent delta; ties and all-distinct fall back to the median.
    counts = Counter(deltas)
    top = max(counts.values())
    winners = [delta for delta, count in counts.items() if count == top]
    if len(winners) == 1 and top > 1:
        return winners[0]
    return float(median(deltas))


class TimeSeries:
    """A homogeneous, time-ordered sequence of points or slots.

    Series are value-semantic: every operation (including append) returns a
    new series and never alters an existing one, so instances can be shared
    freely across threads.

    Args:
        elements: iterable of DataTimePoint or DataTimeSlot, all of one kind,
            all with the same data labels. Points must be strictly increasing
            in time; slots must form a dense succession (each slot starts
            where the previous one ends) with a single unit.
        tz: IANA zone name (or tzinfo) used for display and for calendar
            alignment. Defaults to UTC. Changing it never moves epochs.
        resolution: optional declared TimeUnit for point series (e.g. the
            target unit after resampling). When omitted it is detected from
            the deltas; unequal deltas give the VARIABLE marker.
    """

    def __init__(self, elements=None, tz='UTC', resolution=None):
        self._tzinfo = timezonize(tz)
        self._tz = tz_name(self._tzinfo)
        self._elements = list(elements) if elements is not None else []
        self._validate()
        if resolution is not None:
            resolution = TimeUnit(resolution)
        self._resolution = resolution
        self._auto_interval_cache = None
        if self._resolution is None:
            if self._elements and isinstance(self._elements[0], DataTimeSlot):
                self._resolution = self._elements[0].unit
            else:
                self._resolution = detect_resolution(self)

    @classmethod
    def _build(cls, elements, tzinfo, resolution):
        # Internal fast path for operations that produce already-valid data.
        series = cls.__new__(cls)
        series._tzinfo = tzinfo
        series._tz = tz_name(tzinfo)
        series._elements = elements
        series._resolution = resolution
        series._auto_interval_cache = None
        return series

    def _validate(self):
        elements = self._elements
        if not elements:
            return
        first = elements[0]
        if isinstance(first, DataTimePoint):
            kind = DataTimePoint
        elif isinstance(first, DataTimeSlot):
            kind = DataTimeSlot
        else:
            raise ConsistencyError(
                f'series elements must be DataTimePoint or DataTimeSlot, '
                f'got {type(first).__name__}')
        labels = set(first.data)
        unit = first.unit if kind is DataTimeSlot else None
        for i, element in enumerate(elements):
            if not isinstance(element, kind):
                raise ConsistencyError(
                    f'mixed element kinds: element {i} is {type(element).__name__}, '
                    f'expected {kind.__name__}')
            if set(element.data) != labels:
                raise ConsistencyError(
                    f'element {i} has labels {sorted(element.data)}, '
                    f'expected {sorted(labels)}')
            if i == 0:
                continue
            previous = elements[i - 1]
            if kind is DataTimePoint:
                if not element.t > previous.t:
                    raise ConsistencyError(
                        f'points must be strictly increasing in time: element {i} '
                        f'at t={element.t} does not follow t={previous.t}')
            else:
                if element.unit != unit:
                    raise ConsistencyError(
                        f'slot units must all be equal: element {i} has '
                        f'{element.unit}, expected {unit}')
                if element.start != previous.end:
                    raise ConsistencyError(
                        f'slots must form a dense succession: element {i} starts at '
                        f'{element.start} but the previous slot ends at {previous.end}')

    #-----------------------------
    #  Introspection
    #-----------------------------

    @property
    def tz(self) -> str:
        return self._tz

    @property
    def tzinfo(self):
        return self._tzinfo

    @property
    def resolution(self):
        """The declared/detected TimeUnit, VARIABLE, or None if undefined."""
        return self._resolution

    @property
    def kind(self) -> str:
        if not self._elements:
            return 'empty'
        return 'slots' if isinstance(self._elements[0], DataTimeSlot) else 'points'

    @property
    def labels(self):
        if not self._elements:
            return []
        return list(self._elements[0].data)

    @property
    def index_names(self):
        names = []
        for element in self._elements:
            for name in element.indexes:
                if name not in names:
                    names.append(name)
        return names

    def auto_interval(self):
        """Representative sampling interval in seconds (mode of the deltas,
        falling back to the median on ties). Needs at least two elements."""
        if self._auto_interval_cache is None:
            if len(self._elements) < 2:
                raise ConsistencyError('auto_interval needs at least two elements')
            deltas = [b.t - a.t for a, b in zip(self._elements, self._elements[1:])]
            self._auto_interval_cache = float(_auto_interval(deltas))
        return self._auto_interval_cache

    def detect_resolution(self):
        return detect_resolution(self)

    #-----------------------------
    #  Sequence protocol and access
    #-----------------------------

    def __len__(self):
        return len(self._elements)

    def __iter__(self):
        return iter(self._elements)

    def __bool__(self):
        # A series with elements is truthy, empty is falsy; keep default-ish.
        return len(self._elements) > 0

    def __getitem__(self, selector):
        if isinstance(selector, bool):
            raise TypeError('cannot index a series with a bool')
        if isinstance(selector, int):
            return self._elements[selector]
        if isinstance(selector, str):
            return self.filter(selector)
        if isinstance(selector, (float, datetime)):
            t = self._as_t(selector)
            for element in self._elements:
                if element.t == t:
                    return element
            raise KeyError(f'no element at t={t} (series covers '
                           f'{self._elements[0].t if self._elements else None} to '
                           f'{self._elements[-1].t if self._elements else None})')
        if isinstance(selector, slice):
            return self._slice(selector)
        raise TypeError(f'cannot index a series with {type(selector).__name__}')

    def _as_t(self, value):
        if isinstance(value, datetime):
            if value.tzinfo is None:
                value = value.replace(tzinfo=self._tzinfo)
            return value.timestamp()
        return float(value)

    def _slice(self, selector):
        if selector.step is not None:
            raise ValueError('sliced series do not support a step')
        start, stop = selector.start, selector.stop
        positional = (start is None or isinstance(start, int)) and \
                     (stop is None or isinstance(stop, int))
        if positional:
            elements = self._elements[start:stop]
        else:
            t_from = self._as_t(start) if start is not None else None
            t_to = self._as_t(stop) if stop is not None else None
            elements = [e for e in self._elements
                        if (t_from is None or e.t >= t_from)
                        and (t_to is None or e.t < t_to)]
        return TimeSeries._build(elements, self._tzinfo, self._resolution)

    def slice(self, from_selector=None, to_selector=None):
        """New series restricted to [from, to): positions if ints, else
        timestamps. Resolution is unchanged."""
        return self._slice(slice(from_selector, to_selector))

    def filter(self, *labels):
        """New series keeping only the given data labels (indexes retained)."""
        missing = [label for label in labels if label not in self.labels]
        if missing:
            raise KeyError(f'no such label(s) {missing}: available {self.labels}')
        elements = []
        for element in self._elements:
            data = {label: element.data[label] for label in labels}
            if isinstance(element, DataTimeSlot):
                elements.append(DataTimeSlot(element.start, element.end, data,
                                             dict(element.indexes), element.unit))
            else:
                elements.append(DataTimePoint(element.t, data, dict(element.indexes)))
        return TimeSeries._build(elements, self._tzinfo, self._resolution)

    def append(self, element):
        """New series extended by one element (this series is not modified)."""
        extended = TimeSeries(self._elements + [element], self._tzinfo)
        if (isinstance(self._resolution, TimeUnit) and extended.kind == 'points'
                and extended._resolution == self._resolution):
            # Keep the declared spelling ("1h" rather than a detected "3600s").
            extended._resolution = self._resolution
        return extended

    #-----------------------------
    #  Zone handling and display
    #-----------------------------

    def change_tz(self, tz):
        """New series rendered in another zone. Epochs, payloads and
        resolution are untouched; only display and future calendar
        alignment change."""
        tzinfo = timezonize(tz)
        return TimeSeries._build(self._elements, tzinfo, self._resolution)

    def summarize(self) -> str:
        if not self._elements:
            return 'empty time series'
        count = len(self._elements)
        noun = 'slots' if self.kind == 'slots' else 'points'
        resolution = self._resolution
        if resolution is VARIABLE:
            interval = self.auto_interval()
            res_text = f'variable resolution (~{interval:g}s)'
        elif resolution is None:
            res_text = 'undefined resolution'
        else:
            res_text = f'{resolution} resolution'
        element_noun = noun[:-1]
        first, last = self._elements[0], self._elements[-1]
        return (f'Time series of #{count} {noun} at {res_text}, '
                f'from {element_noun} @ {first.t} ({format_wallclock(first.t, self._tzinfo)}) '
                f'to {element_noun} @ {last.t} ({format_wallclock(last.t, self._tzinfo)})')

    def __str__(self):
        return self.summarize()

    def __repr__(self):
        return self.summarize()

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (self._tz == other._tz
                and self._resolution == other._resolution
                and self._elements == other._elements)

    #-----------------------------
    #  Convenience delegates
    #-----------------------------

    def min(self, label=None):
        from . import ops
        return ops.s_min(self, label)

    def max(self, label=None):
        from . import ops
        return ops.s_max(self, label)

    def avg(self, label=None):
        from . import ops
        return ops.avg(self, label)

    def sum(self, label=None):
        from . import ops
        return ops.s_sum(self, label)

    def resample(self, unit, interpolation='linear'):
        from .transform import resample
        return resample(self, unit, interpolation=interpolation)

    def aggregate(self, unit, operations=None):
        from .transform import aggregate
        return aggregate(self, unit, operations=operations)

    def plot(self, save_to=None, image=False, max_points=10000):
        from . import plot as _plot
        spec = _plot.prepare(self, max_points=max_points)
        if image:
            return _plot.render_image(spec, save_to)
        return _plot.render_html(spec, save_to)
