"""The periodic-average model family.

One fit routine serves three models: per-phase means over a cycle of P
elements make a forecaster (means plus a trailing-window offset), a
reconstructor (means plus offsets estimated on both sides of a gap) and,
through the generic model-based detector, an anomaly detector.
"""

from __future__ import annotations

import logging
from statistics import fmean

from ..core import DataTimeSlot
from ..errors import ConsistencyError, ResolutionError
from ..timeunit import TimeUnit
from .base import Forecaster, ModelBasedAnomalyDetector, Reconstructor, _lost

logger = logging.getLogger(__name__)

# Rough spans, only used to seed the step search for calendar units.
_TYPICAL_SECONDS = {'D': 86400.0, 'W': 604800.0, 'M': 2629746.0, 'Y': 31556952.0}


def _steps_between(unit, origin, t, tz):
    # Whole unit steps from origin to t. Calendar steps are found by a
    # guess-and-refine walk since their span varies along the calendar.
    if unit.is_physical:
        return round((t - origin) / unit.seconds)
    estimate = round((t - origin) / (_TYPICAL_SECONDS[unit.suffix] * unit.count))
    for _ in range(400):
        current = unit.shift(origin, tz, estimate)
        if abs(current - t) < 1.0:
            return estimate
        estimate += 1 if current < t else -1
    raise ConsistencyError(
        f'timestamp {t} does not sit on the {unit} grid anchored at {origin}')


class _PeriodicAverageMixin:
    """Fit and one-step predict shared by the whole family.

    Phases are anchored in time, not by list position: the element at
    epoch t has phase steps(origin -> t) mod P, with the origin fixed at
    fit time. Predictions on any later stretch of the same grid therefore
    line up with the phases seen during fitting.
    """

    def _fit(self, series, periodicity=None, window=None):
        self._fit_segments([series], periodicity=periodicity, window=window)

    def _fit_segments(self, segments, periodicity=None, window=None):
        if periodicity is None:
            raise ValueError(
                'periodicity is a required hyperparameter '
                '(detect_periodicity() can suggest one)')
        if not isinstance(periodicity, int) or isinstance(periodicity, bool) \
                or periodicity < 2:
            raise ValueError(f'periodicity must be an integer >= 2, got {periodicity!r}')
        if window is None:
            window = periodicity
        if not isinstance(window, int) or isinstance(window, bool) or window < 1:
            raise ValueError(f'window must be a positive integer, got {window!r}')
        reference = segments[0]
        unit = reference.resolution
        if not isinstance(unit, TimeUnit):
            raise ResolutionError(
                f'periodic averages need a fixed resolution, this series has '
                f'{unit} (resample or aggregate first)')
        labels = list(reference.labels)
        for segment in segments:
            if segment.resolution != unit:
                raise ResolutionError('all fit segments must share one resolution')
            if set(segment.labels) != set(labels):
                raise ConsistencyError('all fit segments must share one label set')
        total = sum(len(segment) for segment in segments)
        if total < 2 * periodicity:
            raise ConsistencyError(
                f'fitting needs at least two full periods ({2 * periodicity} '
                f'elements at periodicity {periodicity}), got {total}')
        tz = reference.tz
        origin = min(segment[0].t for segment in segments)
        sums = {label: [0.0] * periodicity for label in labels}
        counts = [0] * periodicity
        for segment in segments:
            for element in segment:
                if _lost(element):
                    continue
                phase = _steps_between(unit, origin, element.t, tz) % periodicity
                counts[phase] += 1
                for label in labels:
                    sums[label][phase] += element.data[label]
        empty = [phase for phase, count in enumerate(counts) if count == 0]
        if empty:
            raise ConsistencyError(
                f'no valid data at phase(s) {empty} of {periodicity}: '
                f'cannot average')
        self.data.update({
            'labels': labels,
            'means': {label: [sums[label][phase] / counts[phase]
                              for phase in range(periodicity)]
                      for label in labels},
            'origin': origin,
            'periodicity': periodicity,
            'resolution': str(unit),
            'tz': tz,
            'window': window,
        })
        logger.info('Fitted periodic averages over %s phases from %s element(s)',
                    periodicity, sum(counts))

    def _phase_of(self, t):
        unit = TimeUnit(self.data['resolution'])
        steps = _steps_between(unit, self.data['origin'], t, self.data['tz'])
        return steps % self.data['periodicity']

    def _offset(self, label, elements):
        # Mean deviation from the periodic mean over the given elements.
        means = self.data['means'][label]
        deviations = [element.data[label] - means[self._phase_of(element.t)]
                      for element in elements if not _lost(element)]
        return fmean(deviations) if deviations else 0.0

    def _predict(self, series):
        unit = TimeUnit(self.data['resolution'])
        if series.resolution != unit:
            raise ResolutionError(
                f'this model was fitted at {self.data["resolution"]} resolution, '
                f'the series is at {series.resolution}')
        tail = list(series)[-self.window:]
        last = tail[-1]
        if isinstance(last, DataTimeSlot):
            next_t = last.end
        else:
            next_t = unit.shift(last.t, series.tzinfo)
        next_phase = self._phase_of(next_t)
        return {label: self.data['means'][label][next_phase] + self._offset(label, tail)
                for label in self.data['labels']}


class PeriodicAverageForecaster(_PeriodicAverageMixin, Forecaster):
    """Forecasts the periodic mean at the next phase, corrected by the mean
    deviation observed over the trailing window."""

    kind = 'periodic-average'


class PeriodicAverageReconstructor(_PeriodicAverageMixin, Reconstructor):
    """Overwrites fully-lost gaps with periodic means, offset by the mean
    deviation of up to `window` valid elements on each available side."""

    kind = 'periodic-average-reconstructor'

    def _reconstruct(self, series, start, stop):
        unit = TimeUnit(self.data['resolution'])
        if series.resolution != unit:
            raise ResolutionError(
                f'this model was fitted at {self.data["resolution"]} resolution, '
                f'the series is at {series.resolution}')
        elements = list(series)
        window = self.window
        left = []
        i = start - 1
        while i >= 0 and len(left) < window:
            if not _lost(elements[i]):
                left.append(elements[i])
            i -= 1
        right = []
        i = stop
        while i < len(elements) and len(right) < window:
            if not _lost(elements[i]):
                right.append(elements[i])
            i += 1
        if not left and not right:
            return None
        offsets = {}
        for label in self.data['labels']:
            sides = [self._offset(label, side) for side in (left, right) if side]
            offsets[label] = fmean(sides)
        payloads = []
        for k in range(start, stop):
            phase = self._phase_of(elements[k].t)
            payloads.append({label: self.data['means'][label][phase] + offsets[label]
                             for label in self.data['labels']})
        return payloads


class PeriodicAverageAnomalyDetector(ModelBasedAnomalyDetector):
    """Anomaly detector backed by the periodic-average forecaster."""

    kind = 'periodic-average-anomaly-detector'
    model_class = PeriodicAverageForecaster


def detect_periodicity(series, label=None, max_period=None):
    """Suggested periodicity: the lag (>= 2) with the strongest
    autocorrelation. Never applied implicitly; pass the result to fit()
    if it looks sane."""
    if len(series) < 4:
        raise ConsistencyError('periodicity detection needs at least 4 elements')
    if label is None:
        label = series.labels[0]
    elif label not in series.labels:
        raise KeyError(f'no such label "{label}": available {series.labels}')
    values = [element.data[label] for element in series]
    n = len(values)
    center = fmean(values)
    deviations = [value - center for value in values]
    denominator = sum(deviation * deviation for deviation in deviations)
    if denominator == 0:
        raise ConsistencyError(f'label "{label}" is constant, nothing to detect')
    limit = n // 2 if max_period is None else min(int(max_period), n - 1)
    best_lag = None
    best_value = None
    for lag in range(2, limit + 1):
        value = sum(deviations[i] * deviations[i + lag]
                    for i in range(n - lag)) / denominator
        if best_value is None or value > best_value:
            best_lag, best_value = lag, value
    if best_lag is None:
        raise ConsistencyError('series too short to detect a periodicity')
    logger.info('Detected periodicity: %sx %s', best_lag, series.resolution)
    return best_lag
