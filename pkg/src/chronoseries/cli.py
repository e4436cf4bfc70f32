"""Command-line interface.

One command per pipeline stage: info, resample, aggregate, ops, forecast,
reconstruct, detect-anomalies, plot and convert. Inputs may be plain CSV
or the native format (selected by the first line); outputs default to the
native format, or CSV when the output path ends in .csv. Every failure is
reported as a single "error: <code>: <message>" line on standard error
with a nonzero exit status, and an output file only exists if it was
written completely.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile

from . import io as series_io
from . import ops as series_ops
from . import plot as series_plot
from .errors import (ChronoseriesError, ConsistencyError, CsvError, FormatError,
                     NotFittedError, ResolutionError, UnitParseError, WindowError)
from .models import Model, load_model

logger = logging.getLogger(__name__)

LOG_FORMAT = '[%(levelname)s] %(message)s'

_ERROR_CODES = (
    (UnitParseError, 'unit-parse'),
    (CsvError, 'csv'),
    (FormatError, 'format'),
    (ResolutionError, 'resolution'),
    (WindowError, 'window'),
    (NotFittedError, 'not-fitted'),
    (ConsistencyError, 'consistency'),
    (ChronoseriesError, 'consistency'),
    (KeyError, 'label'),
    (FileNotFoundError, 'not-found'),
    (PermissionError, 'permission'),
    (IsADirectoryError, 'io'),
    (ValueError, 'value'),
    (OSError, 'io'),
)


def _code_for(error):
    for error_class, code in _ERROR_CODES:
        if isinstance(error, error_class):
            return code
    return 'internal'


class _Parser(argparse.ArgumentParser):
    # Flag problems must come out in the same parsable shape as runtime
    # errors, not as a usage dump.
    def error(self, message):
        print(f'error: usage: {message}', file=sys.stderr)
        raise SystemExit(2)


#=============================
#  Shared plumbing
#=============================

def _read_series(path, tz=None):
    """Load CSV or native input, picking the parser from the first line."""
    if path == '-':
        text = sys.stdin.read()
        with tempfile.NamedTemporaryFile('w', suffix='.stdin', delete=False,
                                         encoding='utf-8') as stream:
            stream.write(text)
            path = stream.name
        try:
            return _read_series_file(path, tz)
        finally:
            os.unlink(path)
    return _read_series_file(path, tz)


def _read_series_file(path, tz):
    with open(path, 'rb') as stream:
        first = stream.readline()
    if first.startswith(b'# chronoseries'):
        series = series_io.load(path)
        if tz:
            series = series.change_tz(tz)
        return series
    return series_io.from_csv(path, tz=tz or 'UTC')


def _write_file(path, write):
    """Run `write(tmp_path)` and move the result into place, so the target
    path never holds a half-written artifact."""
    if path is None:
        raise ValueError('no output path given: pass --out')
    directory = os.path.dirname(os.path.abspath(path))
    # Keep the extension: renderers pick their format from it.
    handle, tmp_path = tempfile.mkstemp(dir=directory, prefix='.part.',
                                        suffix=os.path.splitext(path)[1])
    os.close(handle)
    try:
        write(tmp_path)
        os.replace(tmp_path, path)
    finally:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
    return path


def _write_series(series, out, fmt=None):
    if out == '-':
        with tempfile.NamedTemporaryFile('w', suffix='.out', delete=False,
                                         encoding='utf-8') as stream:
            tmp_path = stream.name
        try:
            if fmt == 'csv':
                series_io.to_csv(series, tmp_path)
            else:
                series_io.save(series, tmp_path)
            with open(tmp_path, encoding='utf-8') as stream:
                sys.stdout.write(stream.read())
        finally:
            os.unlink(tmp_path)
        return
    if fmt is None:
        fmt = 'csv' if out.endswith('.csv') else 'native'
    if fmt == 'csv':
        _write_file(out, lambda path: series_io.to_csv(series, path))
    else:
        _write_file(out, lambda path: series_io.save(series, path))
    logger.info('Written %s', out)


def _model_for(name, default_kind):
    """A model instance: from a saved file if `name` points at one, else a
    fresh instance of the named registered kind."""
    if name and os.path.isfile(name):
        return load_model(name), True
    kind = name or default_kind
    model_class = Model._registry.get(kind)
    if model_class is None:
        raise ValueError(f'unknown model "{kind}": known kinds are '
                         f'{sorted(Model._registry)}')
    return model_class(), False


def _fit_hyperparameters(arguments):
    hyperparameters = {}
    if getattr(arguments, 'periodicity', None) is not None:
        hyperparameters['periodicity'] = arguments.periodicity
    if getattr(arguments, 'window', None) is not None:
        hyperparameters['window'] = arguments.window
    return hyperparameters


def _fitted_model(arguments, default_kind, series):
    model, loaded = _model_for(arguments.model, default_kind)
    if not loaded:
        model.fit(series, **_fit_hyperparameters(arguments))
        if arguments.fit_save:
            _write_file(arguments.fit_save, model.save)
            logger.info('Model saved to %s', arguments.fit_save)
    return model


#=============================
#  Commands
#=============================

def _command_info(arguments):
    series = _read_series(arguments.input, arguments.tz)
    print(series.summarize())
    return 0


def _command_resample(arguments):
    series = _read_series(arguments.input, arguments.tz)
    resampled = series.resample(arguments.unit)
    _write_series(resampled, arguments.out)
    return 0


def _command_aggregate(arguments):
    series = _read_series(arguments.input, arguments.tz)
    operations = [token.strip() for token in arguments.ops.split(',')] \
        if arguments.ops else None
    aggregated = series.aggregate(arguments.unit, operations=operations)
    _write_series(aggregated, arguments.out)
    return 0


def _apply_operation(series, token):
    name, _, argument = token.partition(':')
    name = name.strip()
    if name == 'normalize':
        return series_ops.normalize(series)
    if name == 'offset':
        if not argument:
            raise ValueError('offset needs an amount, e.g. offset:-273.15')
        return series_ops.offset(series, float(argument))
    if name == 'rescale':
        if not argument:
            raise ValueError('rescale needs a factor, e.g. rescale:2')
        return series_ops.rescale(series, float(argument))
    if name == 'mavg':
        if not argument:
            raise ValueError('mavg needs a window, e.g. mavg:24')
        return series_ops.mavg(series, int(argument))
    if name in ('diff', 'csum', 'derivative', 'integral'):
        if argument:
            raise ValueError(f'{name} takes no argument')
        return getattr(series_ops, name)(series)
    if name == 'filter':
        if not argument:
            raise ValueError('filter needs labels, e.g. filter:temperature')
        return series_ops.filter(series, *argument.split('+'))
    raise ValueError(
        f'unknown operation "{name}": choose among normalize, offset:<c>, '
        f'rescale:<c>, mavg:<w>, diff, csum, derivative, integral, '
        f'filter:<label>[+<label>...]')


def _command_ops(arguments):
    series = _read_series(arguments.input, arguments.tz)
    for group in arguments.apply:
        for token in group.split(','):
            if token.strip():
                series = _apply_operation(series, token)
    _write_series(series, arguments.out)
    return 0


def _command_forecast(arguments):
    series = _read_series(arguments.input, arguments.tz)
    model = _fitted_model(arguments, 'periodic-average', series)
    result = model.apply(series, steps=arguments.steps)
    _write_series(result, arguments.out)
    return 0


def _command_reconstruct(arguments):
    series = _read_series(arguments.input, arguments.tz)
    model = _fitted_model(arguments, 'periodic-average-reconstructor', series)
    result = model.apply(series)
    _write_series(result, arguments.out)
    return 0


def _command_detect_anomalies(arguments):
    series = _read_series(arguments.input, arguments.tz)
    model = _fitted_model(arguments, 'periodic-average-anomaly-detector', series)
    result = model.apply(series)
    _write_series(result, arguments.out)
    return 0


def _command_plot(arguments):
    if not arguments.html and not arguments.image:
        raise ValueError('pass --html and/or --image to say where to render')
    series = _read_series(arguments.input, arguments.tz)
    spec = series_plot.prepare(series, max_points=arguments.max_points)
    if arguments.html:
        _write_file(arguments.html, lambda path: series_plot.render_html(spec, path))
        logger.info('Written %s', arguments.html)
    if arguments.image:
        _write_file(arguments.image, lambda path: series_plot.render_image(spec, path))
        logger.info('Written %s', arguments.image)
    return 0


def _command_convert(arguments):
    if arguments.input == '-':
        text = sys.stdin.read()
        native_input = text.startswith('# chronoseries')
        with tempfile.NamedTemporaryFile('w', suffix='.stdin', delete=False,
                                         encoding='utf-8') as stream:
            stream.write(text)
            tmp_path = stream.name
        try:
            series = series_io.load(tmp_path) if native_input \
                else series_io.from_csv(tmp_path, tz=arguments.tz or 'UTC')
        finally:
            os.unlink(tmp_path)
        if native_input and arguments.tz:
            series = series.change_tz(arguments.tz)
    else:
        with open(arguments.input, 'rb') as stream:
            native_input = stream.readline().startswith(b'# chronoseries')
        series = _read_series(arguments.input, arguments.tz)
    fmt = arguments.format or ('csv' if native_input else 'native')
    _write_series(series, arguments.out, fmt=fmt)
    return 0


#=============================
#  Parser
#=============================

def _build_parser():
    parser = _Parser(prog='chronoseries',
                     description='Calendar-aware time series processing.')
    parser.add_argument('--log-level', default='info',
                        choices=['debug', 'info', 'warning', 'error', 'critical'],
                        help='verbosity of the pipeline log lines (default info)')
    commands = parser.add_subparsers(dest='command', required=True)

    def add(name, handler, help_text, out=True):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument('input', help='input file: CSV or native format '
                                       '("-" reads standard input for convert)')
        sub.add_argument('--tz', default=None,
                         help='zone for zone-less timestamps and display')
        if out:
            sub.add_argument('--out', default=None,
                             help='output path; native format unless it '
                                  'ends in .csv ("-" streams for convert)')
        sub.set_defaults(handler=handler)
        return sub

    add('info', _command_info, 'print the one-line series summary', out=False)

    sub = add('resample', _command_resample, 'resample to a fixed physical unit')
    sub.add_argument('--unit', required=True, help='target unit, e.g. 1h or 600s')

    sub = add('aggregate', _command_aggregate, 'aggregate into calendar or physical slots')
    sub.add_argument('--unit', required=True, help='slot unit, e.g. 1D or 1h')
    sub.add_argument('--ops', default=None,
                     help='comma list of slot operations (avg,min,max,sum); '
                          'default avg')

    sub = add('ops', _command_ops, 'apply resolution-preserving operations in order')
    sub.add_argument('--apply', action='append', required=True,
                     help='operation, repeatable: normalize, offset:<c>, '
                          'rescale:<c>, mavg:<w>, diff, csum, derivative, '
                          'integral, filter:<label>[+<label>...]')

    def add_model(name, handler, help_text, steps=False):
        sub = add(name, handler, help_text)
        sub.add_argument('--model', default=None,
                         help='registered model kind, or a saved model file')
        sub.add_argument('--periodicity', type=int, default=None,
                         help='cycle length in elements, e.g. 24 for hourly days')
        sub.add_argument('--window', type=int, default=None,
                         help='trailing window size (defaults to the periodicity)')
        sub.add_argument('--fit-save', default=None,
                         help='also save the fitted model to this path')
        if steps:
            sub.add_argument('--steps', type=int, default=1,
                             help='elements to forecast (default 1)')
        return sub

    add_model('forecast', _command_forecast,
              'fit a forecaster and append predicted elements', steps=True)
    add_model('reconstruct', _command_reconstruct,
              'fit a reconstructor and fill fully-lost gaps')
    add_model('detect-anomalies', _command_detect_anomalies,
              'fit an anomaly detector and mark the series')

    sub = add('plot', _command_plot, 'render a self-contained HTML page or image',
              out=False)
    sub.add_argument('--html', default=None, help='write an HTML chart here')
    sub.add_argument('--image', default=None, help='write a static image here')
    sub.add_argument('--max-points', type=int, default=10000,
                     help='aggregation threshold (default 10000)')

    sub = add('convert', _command_convert, 'convert between CSV and native format')
    sub.add_argument('--format', choices=['csv', 'native'], default=None,
                     help='output format; default flips the input format')

    return parser


def main(argv=None):
    parser = _build_parser()
    arguments = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format=LOG_FORMAT, force=True,
                        level=getattr(logging, arguments.log_level.upper()))
    try:
        return arguments.handler(arguments)
    except BrokenPipeError:
        return 1
    except Exception as error:  # every failure becomes one parsable line
        print(f'error: {_code_for(error)}: {error}', file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
