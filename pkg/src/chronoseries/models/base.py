"""Model framework.

The base classes here own everything that is not model-specific: the
fitted-state lifecycle, window and label checking, recursive multi-step
prediction, one-step evaluation with RMSE/MAE/MAPE, contiguous-fold cross
validation, gap scanning for reconstructors, anomaly-index normalization
and the versioned text persistence format. A concrete model only supplies
its fit and predict logic (or, for anomaly detectors, the underlying model
class to delegate to).
"""

from __future__ import annotations

import json
import logging
import math
import re
from statistics import fmean, pstdev

from ..core import DataTimePoint, DataTimeSlot, TimeSeries
from ..errors import (ConsistencyError, FormatError, NotFittedError,
                      ResolutionError, WindowError)
from ..timeunit import TimeUnit, format_wallclock

logger = logging.getLogger(__name__)

FORMAT_VERSION = 'cs-model v1'
METRICS = ('RMSE', 'MAE', 'MAPE')


def _kebab(name):
    return re.sub(r'(?<!^)(?=[A-Z])', '-', name).lower()


def _replace(element, data, indexes):
    if isinstance(element, DataTimeSlot):
        return DataTimeSlot(element.start, element.end, data, indexes, element.unit)
    return DataTimePoint(element.t, data, indexes)


def _lost(element):
    return element.indexes.get('data_loss') == 1


class Model:
    """Common lifecycle of every model.

    Subclasses implement `_fit(series, **hyperparameters)` storing their
    parameters as JSON-serializable entries of `self.data`, and (for
    predictive models) `_predict(series)` returning the payload one step
    past the series tail. Everything else, including persistence and the
    window edge cases, is provided here. Subclasses register themselves
    under a kebab-case kind derived from the class name unless they set
    `kind` explicitly; they must be constructible with no arguments.
    """

    abstract = True
    kind = None
    window_size = 1
    _registry = {}

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if cls.__dict__.get('abstract', False):
            return
        kind = cls.__dict__.get('kind') or _kebab(cls.__name__)
        cls.kind = kind
        existing = Model._registry.get(kind)
        if existing is not None and existing is not cls:
            raise ConsistencyError(
                f'model kind "{kind}" is already registered by {existing.__name__}')
        Model._registry[kind] = cls

    def __init__(self):
        self.data = {}
        self.fitted = False

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return (type(self) is type(other) and self.fitted == other.fitted
                and self.data == other.data)

    def __repr__(self):
        state = 'fitted' if self.fitted else 'unfitted'
        return f'{type(self).__name__} ({state})'

    @property
    def window(self):
        if 'window' in self.data:
            return int(self.data['window'])
        return int(self.window_size)

    #-----------------------------
    #  Fitting
    #-----------------------------

    def fit(self, series, **hyperparameters):
        if not isinstance(series, TimeSeries) or not len(series):
            raise ConsistencyError('fit needs a non-empty time series')
        return self._fit_on([series], **hyperparameters)

    def _fit_on(self, segments, **hyperparameters):
        self.data = {}
        self.fitted = False
        self._fit_segments(segments, **hyperparameters)
        self.data.setdefault('labels', list(segments[0].labels))
        self.data.setdefault('window', int(self.window_size))
        self.fitted = True
        return self

    def _fit_segments(self, segments, **hyperparameters):
        # Models that cannot pool disjoint segments fit on the largest one.
        best = max(segments, key=len)
        self._fit(best, **hyperparameters)

    def _fit(self, series, **hyperparameters):
        raise NotImplementedError(f'{type(self).__name__} does not implement _fit')

    def _predict(self, series):
        raise NotImplementedError(f'{type(self).__name__} does not implement _predict')

    #-----------------------------
    #  Checks
    #-----------------------------

    def _check_fitted(self):
        if not self.fitted:
            raise NotFittedError(f'this {type(self).__name__} is not fitted')

    def _check_labels(self, series):
        if set(series.labels) != set(self.data['labels']):
            raise ConsistencyError(
                f'series labels {sorted(series.labels)} do not match the fit '
                f'labels {sorted(self.data["labels"])}')

    def _predict_checked(self, series):
        payload = self._predict(series)
        expected = set(self.data['labels'])
        if not isinstance(payload, dict) or set(payload) != expected:
            got = sorted(payload) if isinstance(payload, dict) else repr(payload)
            raise ConsistencyError(
                f'predict returned labels {got}, expected {sorted(expected)}')
        return {label: float(value) for label, value in payload.items()}

    def _next_element(self, last, payload, series, indexes):
        resolution = series.resolution
        if not isinstance(resolution, TimeUnit):
            raise ResolutionError(
                f'cannot place new elements on a series at {resolution} '
                f'resolution: resample or aggregate first')
        if isinstance(last, DataTimeSlot):
            end = resolution.shift(last.end, series.tzinfo)
            return DataTimeSlot(last.end, end, payload, indexes,
                                last.unit if last.unit is not None else resolution)
        return DataTimePoint(resolution.shift(last.t, series.tzinfo), payload, indexes)

    #-----------------------------
    #  Prediction
    #-----------------------------

    def predict(self, series, steps=1):
        """Payloads for the next `steps` elements past the series tail.

        Multi-step predictions are recursive: each step is predicted from
        the series extended with the previous predictions.
        """
        self._check_fitted()
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
            raise ValueError(f'steps must be a positive integer, got {steps!r}')
        if not len(series):
            raise ConsistencyError('cannot predict from an empty series')
        self._check_labels(series)
        if len(series) < self.window:
            raise WindowError(
                f'{type(self).__name__} needs at least {self.window} element(s) '
                f'to predict, the series has {len(series)}')
        payloads = []
        extended = list(series)
        for step in range(steps):
            view = TimeSeries._build(extended, series.tzinfo, series.resolution)
            payload = self._predict_checked(view)
            payloads.append(payload)
            if step < steps - 1:
                extended = extended + [
                    self._next_element(extended[-1], payload, series, None)]
        return payloads

    #-----------------------------
    #  Evaluation
    #-----------------------------

    def _one_step_pairs(self, series):
        # Walk every window-sized stretch with no fully-lost element and a
        # not-fully-lost actual right after it; yield (actual, prediction).
        window = self.window
        elements = list(series)
        pairs = []
        for i in range(window, len(elements)):
            if any(_lost(element) for element in elements[i - window:i]):
                continue
            actual = elements[i]
            if _lost(actual):
                continue
            view = TimeSeries._build(elements[i - window:i], series.tzinfo,
                                     series.resolution)
            pairs.append((actual, self._predict_checked(view)))
        return pairs

    def evaluate(self, series, metrics=METRICS):
        """One-step-ahead error metrics over all valid windows.

        Returns a dict of "<label>_<METRIC>" entries. Windows containing
        fully-lost elements are skipped, as are pairs whose actual element
        is fully lost.
        """
        self._check_fitted()
        chosen = [str(metric).upper() for metric in metrics]
        unknown = [metric for metric in chosen if metric not in METRICS]
        if unknown:
            raise ValueError(f'unknown metrics {unknown}: choose among {list(METRICS)}')
        if not chosen:
            raise ValueError('no metrics requested')
        self._check_labels(series)
        pairs = self._one_step_pairs(series)
        if not pairs:
            raise ConsistencyError(
                'no valid evaluation pairs: the series is shorter than '
                'window + 1 or every window is interrupted by full losses')
        report = {}
        for label in self.data['labels']:
            values = [(actual.data[label], payload[label]) for actual, payload in pairs]
            for metric in chosen:
                report[f'{label}_{metric}'] = _metric(metric, values, label)
        return report

    def cross_validate(self, series, rounds=3, metrics=METRICS, **hyperparameters):
        """Contiguous-fold cross validation.

        The series is cut into `rounds` folds in time order; round i
        validates on fold i after fitting a fresh model on the remaining
        segments. Returns "<label>_<METRIC>_avg" and "_stdev" entries
        (population standard deviation across rounds).
        """
        if not isinstance(rounds, int) or isinstance(rounds, bool) or rounds < 2:
            raise ValueError(f'cross validation needs rounds >= 2, got {rounds!r}')
        n = len(series)
        if n < rounds:
            raise ConsistencyError(f'cannot split {n} element(s) into {rounds} folds')
        elements = list(series)
        per_round = []
        for r in range(rounds):
            lo = r * n // rounds
            hi = (r + 1) * n // rounds
            fold = TimeSeries._build(elements[lo:hi], series.tzinfo, series.resolution)
            segments = []
            if lo > 0:
                segments.append(TimeSeries._build(elements[:lo], series.tzinfo,
                                                  series.resolution))
            if hi < n:
                segments.append(TimeSeries._build(elements[hi:], series.tzinfo,
                                                  series.resolution))
            round_model = type(self)()
            round_model._fit_on(segments, **hyperparameters)
            if len(fold) < round_model.window:
                raise WindowError(
                    f'fold {r + 1} has {len(fold)} element(s), shorter than '
                    f'the model window {round_model.window}')
            logger.info(
                'Cross validation round %s/%s: validate from %s (%s) to %s (%s), '
                'fit on the rest', r + 1, rounds,
                fold[0].t, format_wallclock(fold[0].t, series.tzinfo),
                fold[-1].t, format_wallclock(fold[-1].t, series.tzinfo))
            per_round.append(round_model.evaluate(fold, metrics))
        report = {}
        for key in per_round[0]:
            values = [round_report[key] for round_report in per_round]
            report[f'{key}_avg'] = fmean(values)
            report[f'{key}_stdev'] = pstdev(values)
        return report

    #-----------------------------
    #  Persistence
    #-----------------------------

    def save(self, path):
        """Write the fitted model as a self-describing text document."""
        if not self.fitted:
            raise NotFittedError('cannot save an unfitted model')
        payload = json.dumps(self.data, indent=2, sort_keys=True)
        with open(path, 'w', encoding='utf-8') as stream:
            stream.write(f'# {FORMAT_VERSION}\n# kind: {self.kind}\n{payload}\n')
        return path

    @classmethod
    def load(cls, path):
        """Read back a saved model, dispatching on its recorded kind."""
        with open(path, encoding='utf-8') as stream:
            text = stream.read()
        lines = text.splitlines()
        if not lines or not lines[0].startswith('# cs-model'):
            raise FormatError(f'not a model file: expected a "# {FORMAT_VERSION}" header')
        version = lines[0][2:].strip()
        if version != FORMAT_VERSION:
            raise FormatError(
                f'model format "{version}" is not readable by this build, '
                f'which understands "{FORMAT_VERSION}"')
        if len(lines) < 2 or not lines[1].startswith('# kind:'):
            raise FormatError('model file is missing its kind header')
        kind = lines[1].split(':', 1)[1].strip()
        model_class = Model._registry.get(kind)
        if model_class is None:
            raise FormatError(
                f'unknown model kind "{kind}": known kinds are {sorted(Model._registry)}')
        try:
            data = json.loads('\n'.join(lines[2:]))
        except json.JSONDecodeError as error:
            raise FormatError(f'truncated or corrupt model file: {error}') from None
        model = model_class()
        model.data = data
        model.fitted = True
        return model


def _metric(metric, values, label):
    if metric == 'RMSE':
        return math.sqrt(fmean([(actual - predicted) ** 2
                                for actual, predicted in values]))
    if metric == 'MAE':
        return fmean([abs(actual - predicted) for actual, predicted in values])
    # MAPE skips zero actuals; with none left there is nothing to divide by.
    nonzero = [(actual, predicted) for actual, predicted in values if actual != 0]
    if not nonzero:
        raise ConsistencyError(
            f'MAPE is undefined for label "{label}": all actual values are zero')
    return fmean([abs(actual - predicted) / abs(actual)
                  for actual, predicted in nonzero])


def load_model(path):
    """Load any saved model; the file records which kind to instantiate."""
    return Model.load(path)


class Forecaster(Model):
    """Predictive model whose apply() extends the series tail."""

    abstract = True

    def apply(self, series, steps=1):
        """The series plus `steps` predicted elements, each marked with a
        forecast index of 1.0. The input elements are carried over as-is."""
        payloads = self.predict(series, steps)
        elements = list(series)
        for payload in payloads:
            elements.append(self._next_element(elements[-1], payload, series,
                                               {'forecast': 1.0}))
        return TimeSeries._build(elements, series.tzinfo, series.resolution)


class Reconstructor(Model):
    """Predictive model whose apply() overwrites fully-lost gaps.

    Only elements with data_loss == 1 are candidates; partial losses stay
    untouched. A gap must be followed by an existing element: tail gaps are
    left alone with a warning, as are gaps with no usable data on either
    side. Reconstructed elements keep their data_loss and additionally get
    data_reconstructed = 1.0.
    """

    abstract = True

    def apply(self, series):
        self._check_fitted()
        if not len(series):
            raise ConsistencyError('cannot reconstruct an empty series')
        self._check_labels(series)
        elements = list(series)
        out = list(elements)
        n = len(elements)
        i = 0
        while i < n:
            if not _lost(elements[i]):
                i += 1
                continue
            j = i
            while j < n and _lost(elements[j]):
                j += 1
            if j == n:
                logger.warning(
                    'Gap at the series tail (elements %s..%s) has no following '
                    'element, leaving it untouched', i, n - 1)
                break
            payloads = self._reconstruct(series, i, j)
            if payloads is None:
                logger.warning(
                    'No usable data around the gap at elements %s..%s, '
                    'leaving it untouched', i, j - 1)
            else:
                if len(payloads) != j - i:
                    raise ConsistencyError(
                        f'reconstruction returned {len(payloads)} payload(s) '
                        f'for a gap of {j - i}')
                expected = set(self.data['labels'])
                for k, payload in zip(range(i, j), payloads):
                    if set(payload) != expected:
                        raise ConsistencyError(
                            f'reconstruction returned labels {sorted(payload)}, '
                            f'expected {sorted(expected)}')
                    old = elements[k]
                    indexes = dict(old.indexes)
                    indexes['data_reconstructed'] = 1.0
                    out[k] = _replace(old, {label: float(payload[label])
                                            for label in payload}, indexes)
            i = j
        return TimeSeries._build(out, series.tzinfo, series.resolution)

    def _reconstruct(self, series, start, stop):
        """Payloads for elements [start, stop), or None if undecidable."""
        raise NotImplementedError(f'{type(self).__name__} does not implement _reconstruct')


class ModelBasedAnomalyDetector(Model):
    """Anomaly detector delegating its modeling to an underlying predictive
    model class.

    Fitting fits the underlying model, then replays one-step predictions
    over the fit series to record the absolute-error distribution per
    label. Applying turns each element's prediction error into an index in
    [0, 1]: 0 at (or below) the fit-time mean error, 1 at the fit-time
    maximum, linear in between, clamped outside.
    """

    abstract = True
    model_class = None

    def _fit(self, series, **hyperparameters):
        if self.model_class is None:
            raise ConsistencyError(
                f'{type(self).__name__} has no underlying model_class set')
        underlying = self.model_class()
        underlying.fit(series, **hyperparameters)
        logger.info('Model fitted, now computing the error distribution(s)')
        pairs = underlying._one_step_pairs(series)
        if not pairs:
            raise ConsistencyError(
                'no valid windows to compute the error distribution from')
        distribution = {}
        for label in underlying.data['labels']:
            errors = [abs(actual.data[label] - payload[label])
                      for actual, payload in pairs]
            distribution[label] = {
                'mean': fmean(errors),
                'stdev': pstdev(errors),
                'max': max(errors),
                'count': len(errors),
            }
        self.data['model_kind'] = underlying.kind
        self.data['model'] = underlying.data
        self.data['error_distribution'] = distribution
        self.data['labels'] = list(underlying.data['labels'])
        self.data['window'] = underlying.window

    def _underlying(self):
        model_class = Model._registry.get(self.data['model_kind'])
        if model_class is None:
            raise FormatError(
                f'underlying model kind "{self.data["model_kind"]}" is not '
                f'registered (import its class first)')
        model = model_class()
        model.data = self.data['model']
        model.fitted = True
        return model

    def index_for(self, label, error):
        """Anomaly index for an absolute error on one label."""
        stats = self.data['error_distribution'][label]
        if stats['max'] == stats['mean']:
            return 0.0 if error <= stats['mean'] else 1.0
        value = (error - stats['mean']) / (stats['max'] - stats['mean'])
        return min(max(value, 0.0), 1.0)

    def apply(self, series):
        """The series with an anomaly index on every element that has a
        clean window behind it; the index is the worst one over the labels.
        Fully-lost elements get no index."""
        self._check_fitted()
        if not len(series):
            raise ConsistencyError('cannot detect anomalies on an empty series')
        self._check_labels(series)
        underlying = self._underlying()
        window = underlying.window
        elements = list(series)
        out = list(elements)
        marked = 0
        for i in range(window, len(elements)):
            if any(_lost(element) for element in elements[i - window:i]):
                continue
            actual = elements[i]
            if _lost(actual):
                continue
            view = TimeSeries._build(elements[i - window:i], series.tzinfo,
                                     series.resolution)
            payload = underlying._predict_checked(view)
            index = max(self.index_for(label,
                                       abs(actual.data[label] - payload[label]))
                        for label in self.data['labels'])
            indexes = dict(actual.indexes)
            indexes['anomaly'] = index
            out[i] = _replace(actual, dict(actual.data), indexes)
            marked += 1
        logger.info('Anomaly index computed on %s of %s elements', marked,
                    len(elements))
        return TimeSeries._build(out, series.tzinfo, series.resolution)

    def evaluate(self, series, metrics=METRICS):
        raise ConsistencyError(
            'forecast metrics are not defined for anomaly detectors: '
            'evaluate the underlying model instead')

    def cross_validate(self, series, rounds=3, metrics=METRICS, **hyperparameters):
        raise ConsistencyError(
            'cross validation is not defined for anomaly detectors: '
            'cross-validate the underlying model instead')
