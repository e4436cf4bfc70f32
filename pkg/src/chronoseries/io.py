"""CSV ingestion with auto-detection, CSV export, and the native format.

CSV import detects the encoding, the field separator, the header row and
the timestamp format, in that order; every detected choice can be forced
through an override. Standard CSV export is deliberately lossy (no data
indexes). The native format is the lossless one: it round-trips kind,
zone, resolution, labels and every data index bit-exact.
"""

from __future__ import annotations

import csv
import logging
from collections import Counter
from datetime import datetime, timezone

from .core import DataTimePoint, DataTimeSlot, TimeSeries, VARIABLE
from .errors import ConsistencyError, CsvError, FormatError
from .timeunit import TimeUnit, timezonize

logger = logging.getLogger(__name__)

NATIVE_VERSION = 'chronoseries v1'
_SEPARATORS = (',', ';', '\t')
_PLAIN_FORMAT = 'YYYY-MM-DD HH:MM:SS'


#=============================
#  CSV reading
#=============================

def _decode(raw, encoding=None):
    if encoding is not None:
        try:
            return raw.decode(encoding)
        except (UnicodeDecodeError, LookupError) as error:
            raise CsvError(f'cannot decode the file as {encoding}: {error}') from None
    if raw.startswith(b'\xef\xbb\xbf'):
        return raw.decode('utf-8-sig')
    if raw.startswith(b'\xff\xfe') or raw.startswith(b'\xfe\xff'):
        return raw.decode('utf-16')
    try:
        return raw.decode('utf-8')
    except UnicodeDecodeError:
        # 8-bit fallback: decodes any byte, mojibake is the caller's risk.
        return raw.decode('latin-1')


def _detect_separator(lines):
    # The winner splits the most lines into the same column count, needing
    # more than one column. Ties go in candidate order.
    scores = {}
    for candidate in _SEPARATORS:
        counts = Counter()
        for row in csv.reader(lines, delimiter=candidate):
            if row:
                counts[len(row)] += 1
        if not counts:
            continue
        columns, hits = max(counts.items(), key=lambda item: (item[1], item[0]))
        if columns < 2:
            continue
        scores[candidate] = hits / sum(counts.values())
    if not scores:
        raise CsvError('could not detect a field separator: no candidate '
                       'yields more than one column')
    top = max(scores.values())
    for candidate in _SEPARATORS:
        if scores.get(candidate) == top:
            return candidate


def _timestamp_parser(format_name, tzinfo):
    """Parser closure for one of the named formats or a strptime pattern.

    Timestamps without zone information are interpreted in tzinfo (UTC by
    default, matching the common convention for zone-less exports).
    """
    if format_name == 'epoch':
        return float
    if format_name == 'iso':
        def parse(cell):
            text = cell[:-1] + '+00:00' if cell.endswith('Z') else cell
            parsed = datetime.fromisoformat(text)
            if parsed.tzinfo is None:
                parsed = parsed.replace(tzinfo=tzinfo)
            return parsed.timestamp()
        return parse
    pattern = '%Y-%m-%d %H:%M:%S' if format_name == _PLAIN_FORMAT else format_name
    def parse(cell):
        parsed = datetime.strptime(cell, pattern)
        if parsed.tzinfo is None:
            parsed = parsed.replace(tzinfo=tzinfo)
        return parsed.timestamp()
    return parse


def _detect_timestamp_format(cell):
    # Priority: epoch, then ISO 8601, then plain "YYYY-MM-DD HH:MM:SS".
    try:
        float(cell)
        return 'epoch'
    except ValueError:
        pass
    if 'T' in cell:
        try:
            _timestamp_parser('iso', timezone.utc)(cell)
            return 'iso'
        except ValueError:
            pass
    try:
        _timestamp_parser(_PLAIN_FORMAT, timezone.utc)(cell)
        return _PLAIN_FORMAT
    except ValueError:
        pass
    return None


def _value_like(cell):
    cell = cell.strip()
    if not cell:
        return False
    try:
        float(cell)
        return True
    except ValueError:
        return _detect_timestamp_format(cell) is not None


def _resolve_column(selector, header_cells, n_cols, role):
    if isinstance(selector, bool):
        raise CsvError(f'{role} must be a column index or header name')
    if isinstance(selector, int):
        if not 0 <= selector < n_cols:
            raise CsvError(f'{role} {selector} out of range for {n_cols} columns')
        return selector
    if header_cells is None:
        raise CsvError(f'cannot resolve {role} "{selector}" by name: '
                       f'the file has no header row')
    try:
        return header_cells.index(selector)
    except ValueError:
        raise CsvError(f'no column named "{selector}" in the header '
                       f'{header_cells}') from None


def from_csv(path, *, encoding=None, separator=None, header=None,
             timestamp_column=None, timestamp_format=None,
             value_columns=None, labels=None, tz='UTC'):
    """Parse a CSV file into a time series.

    All keyword arguments are overrides; anything left at None is
    auto-detected. `timestamp_column` and `value_columns` accept column
    indexes or header names; `timestamp_format` accepts "epoch", "iso",
    "YYYY-MM-DD HH:MM:SS" or a strptime pattern; `tz` interprets zone-less
    timestamps and becomes the series zone.
    """
    with open(path, 'rb') as stream:
        raw = stream.read()
    text = _decode(raw, encoding)
    numbered = [(n, line) for n, line in enumerate(text.splitlines(), 1)
                if line.strip()]
    if not numbered:
        raise CsvError(f'no data rows in {path}')
    if separator is None:
        separator = _detect_separator([line for _, line in numbered])
    parsed = [(n, next(csv.reader([line], delimiter=separator)))
              for n, line in numbered]

    n_cols = len(parsed[0][1])
    for n, cells in parsed:
        if len(cells) != n_cols:
            raise CsvError(f'line {n}: expected {n_cols} field(s) as on the '
                           f'first row, got {len(cells)}')

    if header is None:
        header = any(not _value_like(cell) for cell in parsed[0][1])
    header_cells = [cell.strip() for cell in parsed[0][1]] if header else None
    data_rows = parsed[1:] if header else parsed
    if not data_rows:
        raise CsvError(f'no data rows after the header in {path}')

    # Two leading epoch columns named start/end mean slots, as written by
    # to_csv; anything else is read as points.
    slot_mode = (header_cells is not None and n_cols >= 3
                 and header_cells[0] == 'start_epoch'
                 and header_cells[1] == 'end_epoch'
                 and timestamp_column is None)
    if slot_mode:
        ts_indexes = [0, 1]
    elif timestamp_column is None:
        ts_indexes = [0]
    else:
        ts_indexes = [_resolve_column(timestamp_column, header_cells, n_cols,
                                      'timestamp column')]

    if value_columns is None:
        value_indexes = [i for i in range(n_cols) if i not in ts_indexes]
    else:
        value_indexes = [_resolve_column(selector, header_cells, n_cols,
                                         'value column')
                         for selector in value_columns]
    if not value_indexes:
        raise CsvError('no value columns left after the timestamp column(s)')

    if labels is not None:
        if len(labels) != len(value_indexes):
            raise CsvError(f'{len(labels)} label(s) given for '
                           f'{len(value_indexes)} value column(s)')
        out_labels = [str(label) for label in labels]
    elif header_cells is not None:
        out_labels = [header_cells[i] for i in value_indexes]
    else:
        out_labels = [f'value_{k}' for k in range(1, len(value_indexes) + 1)]

    tzinfo = timezonize(tz)
    if timestamp_format is None:
        first_n, first_cells = data_rows[0]
        probe = first_cells[ts_indexes[0]].strip()
        timestamp_format = _detect_timestamp_format(probe)
        if timestamp_format is None:
            raise CsvError(f'line {first_n}: cannot interpret "{probe}" as an '
                           f'epoch, ISO 8601 or "{_PLAIN_FORMAT}" timestamp')
    parse_timestamp = _timestamp_parser(timestamp_format, tzinfo)

    records = []
    for n, cells in data_rows:
        try:
            stamps = [parse_timestamp(cells[i].strip()) for i in ts_indexes]
        except ValueError:
            raise CsvError(f'line {n}: cannot parse timestamp '
                           f'"{cells[ts_indexes[0]].strip()}" as '
                           f'{timestamp_format}') from None
        data = {}
        for label, i in zip(out_labels, value_indexes):
            cell = cells[i].strip()
            try:
                data[label] = float(cell)
            except ValueError:
                raise CsvError(f'line {n}: cannot parse value "{cell}" for '
                               f'label "{label}"') from None
        records.append((stamps, data, n))

    records.sort(key=lambda record: record[0][0])
    for (ts_a, _, line_a), (ts_b, _, line_b) in zip(records, records[1:]):
        if ts_a[0] == ts_b[0]:
            raise CsvError(f'duplicate timestamp {ts_a[0]} on lines {line_a} '
                           f'and {line_b}')

    if slot_mode:
        elements = [DataTimeSlot(stamps[0], stamps[1], data)
                    for stamps, data, _ in records]
    else:
        elements = [DataTimePoint(stamps[0], data) for stamps, data, _ in records]
    series = TimeSeries(elements, tz=tzinfo)
    logger.info('Loaded %s %s from %s', len(series), series.kind, path)
    return series


#=============================
#  CSV writing
#=============================

def to_csv(series, path):
    """Write a series as plain CSV: epoch column(s), then one column per
    label. Data indexes are not exported; use save() to keep them."""
    if not len(series):
        raise ConsistencyError('cannot export an empty series')
    labels = series.labels
    with open(path, 'w', encoding='utf-8', newline='') as stream:
        writer = csv.writer(stream)
        if series.kind == 'slots':
            writer.writerow(['start_epoch', 'end_epoch'] + labels)
            for element in series:
                writer.writerow([repr(element.start), repr(element.end)]
                                + [repr(element.data[label]) for label in labels])
        else:
            writer.writerow(['epoch'] + labels)
            for element in series:
                writer.writerow([repr(element.t)]
                                + [repr(element.data[label]) for label in labels])
    return path


#=============================
#  Native format
#=============================

def save(series, path):
    """Write a series in the native lossless format.

    Layout: a version line, then kind, tz, resolution, labels and indexes
    headers, then one CSV row per element: epoch (plus end epoch for
    slots), the values in label order, the index values in declared order
    with absent indexes left as empty fields. All numbers use full
    round-trip precision.
    """
    if not len(series):
        raise ConsistencyError('cannot save an empty series')
    labels = series.labels
    index_names = series.index_names
    resolution = series.resolution
    if resolution is VARIABLE:
        resolution_text = 'variable'
    elif resolution is None:
        resolution_text = 'none'
    else:
        resolution_text = str(resolution)
    slots = series.kind == 'slots'
    lines = [f'# {NATIVE_VERSION}',
             f'# kind: {series.kind}',
             f'# tz: {series.tz}',
             f'# resolution: {resolution_text}',
             f'# labels: {",".join(labels)}',
             f'# indexes: {",".join(index_names)}'.rstrip()]
    for element in series:
        cells = [repr(element.start), repr(element.end)] if slots else [repr(element.t)]
        cells += [repr(element.data[label]) for label in labels]
        cells += [repr(element.indexes[name]) if name in element.indexes else ''
                  for name in index_names]
        lines.append(','.join(cells))
    with open(path, 'w', encoding='utf-8') as stream:
        stream.write('\n'.join(lines) + '\n')
    return path


def load(path):
    """Read back a natively saved series, bit-exact."""
    with open(path, encoding='utf-8') as stream:
        text = stream.read()
    lines = text.splitlines()
    if not lines or not lines[0].startswith('# chronoseries'):
        raise FormatError(f'not a native series file: expected a '
                          f'"# {NATIVE_VERSION}" first line')
    version = lines[0][2:].strip()
    if version != NATIVE_VERSION:
        raise FormatError(f'native format "{version}" is not readable by this '
                          f'build, which understands "{NATIVE_VERSION}"')
    headers = {}
    body_start = 1
    for line in lines[1:]:
        if line.startswith('#'):
            key, colon, value = line.lstrip('# ').partition(':')
            if not colon:
                raise FormatError(f'malformed header line "{line}"')
            headers[key.strip()] = value.strip()
            body_start += 1
        else:
            break
    for required in ('kind', 'tz', 'resolution', 'labels', 'indexes'):
        if required not in headers:
            raise FormatError(f'missing "{required}" header')
    kind = headers['kind']
    if kind not in ('points', 'slots'):
        raise FormatError(f'unknown element kind "{kind}"')
    labels = headers['labels'].split(',') if headers['labels'] else []
    if not labels:
        raise FormatError('no labels declared')
    index_names = headers['indexes'].split(',') if headers['indexes'] else []
    resolution_text = headers['resolution']
    unit = None
    if resolution_text not in ('variable', 'none'):
        unit = TimeUnit(resolution_text)

    n_stamps = 2 if kind == 'slots' else 1
    arity = n_stamps + len(labels) + len(index_names)
    elements = []
    for offset, line in enumerate(lines[body_start:], body_start + 1):
        if not line.strip():
            continue
        cells = line.split(',')
        if len(cells) != arity:
            raise FormatError(
                f'line {offset}: expected {arity} field(s) for {len(labels)} '
                f'label(s) and {len(index_names)} index(es), got {len(cells)}')
        try:
            stamps = [float(cell) for cell in cells[:n_stamps]]
            data = {label: float(cell) for label, cell
                    in zip(labels, cells[n_stamps:n_stamps + len(labels)])}
            indexes = {name: float(cell) for name, cell
                       in zip(index_names, cells[n_stamps + len(labels):])
                       if cell != ''}
        except ValueError as error:
            raise FormatError(f'line {offset}: bad number ({error})') from None
        if kind == 'slots':
            elements.append(DataTimeSlot(stamps[0], stamps[1], data, indexes, unit))
        else:
            elements.append(DataTimePoint(stamps[0], data, indexes))
    if not elements:
        raise FormatError('no data rows')
    declared = str(unit) if (kind == 'points' and unit is not None) else None
    series = TimeSeries(elements, tz=headers['tz'], resolution=declared)
    logger.info('Loaded %s %s from %s', len(series), series.kind, path)
    return series
