"""Builders shared across the test modules."""

from chronoseries import DataTimePoint, DataTimeSlot, TimeSeries, TimeUnit, timezonize


def point_series(values, start=0.0, step=600.0, label='value', tz='UTC',
                 losses=None, resolution=None):
    """Evenly spaced point series. losses: optional per-element data_loss list
    (None entries mean no index on that element)."""
    elements = []
    for i, value in enumerate(values):
        indexes = {}
        if losses and losses[i] is not None:
            indexes['data_loss'] = losses[i]
        elements.append(DataTimePoint(start + i * step, {label: float(value)},
                                      indexes=indexes))
    return TimeSeries(elements, tz=tz, resolution=resolution)


def multi_point_series(rows, start=0.0, step=600.0, tz='UTC'):
    """rows: list of dicts, one payload per element."""
    elements = [DataTimePoint(start + i * step, dict(row))
                for i, row in enumerate(rows)]
    return TimeSeries(elements, tz=tz)


def slot_series(values, start=0.0, unit='1h', label='value', tz='UTC', losses=None):
    """Contiguous slot series; slot ends follow the unit (DST-aware)."""
    u = TimeUnit(unit)
    tzinfo = timezonize(tz)
    elements = []
    t = float(start)
    for i, value in enumerate(values):
        end = u.shift(t, tzinfo)
        indexes = {}
        if losses and losses[i] is not None:
            indexes['data_loss'] = losses[i]
        elements.append(DataTimeSlot(t, end, {label: float(value)},
                                     indexes=indexes, unit=u))
        t = end
    return TimeSeries(elements, tz=tz)
