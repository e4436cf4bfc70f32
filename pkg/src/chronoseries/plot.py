"""Plot preparation and rendering.

prepare() reduces a series to at most max_points plotted buckets by
power-of-10 aggregation, keeping per-label min/max dispersion bands and
bucketed index overlays. render_html() writes a single self-contained
page: one JSON data island plus one inline chart script, no external
references. render_image() draws the same content natively, with no
browser involved, deterministically.
"""

from __future__ import annotations

import json
import logging
import math
from statistics import fmean

from .core import TimeSeries
from .errors import ConsistencyError
from .timeunit import dt_from_t, timezonize

logger = logging.getLogger(__name__)

ISLAND_VERSION = 'cs-island v1'


class PlotSpec:
    """Everything a renderer needs, already aggregated.

    Attributes:
        tz: zone name the timestamps should be displayed in.
        factor: aggregation factor (1 = every element plotted as-is).
        labels: data labels, in series order.
        t_start / t_end: per-bucket epoch bounds (equal for unaggregated
            points). Always as long as every value sequence.
        values: label -> plotted line (bucket averages when aggregated).
        bands: label -> (min values, max values), or None when factor 1.
        overlays: index name -> per-bucket values with None where the
            index is absent.
    """

    def __init__(self, tz, factor, labels, t_start, t_end, values, bands, overlays):
        self.tz = tz
        self.factor = factor
        self.labels = list(labels)
        self.t_start = list(t_start)
        self.t_end = list(t_end)
        self.values = values
        self.bands = bands
        self.overlays = overlays
        self._validate()

    def _validate(self):
        length = len(self.t_start)
        if len(self.t_end) != length:
            raise ConsistencyError('t_start and t_end lengths differ')
        for label in self.labels:
            if len(self.values[label]) != length:
                raise ConsistencyError(f'value sequence for "{label}" has the '
                                       f'wrong length')
            if self.bands is not None:
                lows, highs = self.bands[label]
                if len(lows) != length or len(highs) != length:
                    raise ConsistencyError(f'band for "{label}" has the wrong length')
                for low, value, high in zip(lows, self.values[label], highs):
                    if not low <= value <= high:
                        raise ConsistencyError(
                            f'band for "{label}" does not contain the line: '
                            f'{low} <= {value} <= {high} fails')
        for name, sequence in self.overlays.items():
            if len(sequence) != length:
                raise ConsistencyError(f'overlay "{name}" has the wrong length')

    def __len__(self):
        return len(self.t_start)


def prepare(series, max_points=10000):
    """Aggregate a series for plotting.

    If the series exceeds max_points, buckets of the smallest sufficient
    power of 10 are averaged into the plotted line, with per-bucket
    min/max kept as a dispersion band. Data indexes aggregate by bucket
    mean, except anomaly which keeps the bucket maximum.
    """
    if not len(series):
        raise ConsistencyError('cannot plot an empty series')
    if max_points < 1:
        raise ValueError(f'max_points must be positive, got {max_points}')
    n = len(series)
    factor = 1
    while math.ceil(n / factor) > max_points:
        factor *= 10
    labels = series.labels
    index_names = series.index_names
    elements = list(series)
    slots = series.kind == 'slots'

    if factor == 1:
        t_start = [element.t for element in elements]
        t_end = [element.end if slots else element.t for element in elements]
        values = {label: [element.data[label] for element in elements]
                  for label in labels}
        overlays = {name: [element.indexes.get(name) for element in elements]
                    for name in index_names}
        return PlotSpec(series.tz, 1, labels, t_start, t_end, values, None, overlays)

    logger.info('Aggregating by "%s" for improved plotting', factor)
    t_start = []
    t_end = []
    values = {label: [] for label in labels}
    bands = {label: ([], []) for label in labels}
    overlays = {name: [] for name in index_names}
    for at in range(0, n, factor):
        chunk = elements[at:at + factor]
        t_start.append(chunk[0].t)
        t_end.append(chunk[-1].end if slots else chunk[-1].t)
        for label in labels:
            chunk_values = [element.data[label] for element in chunk]
            values[label].append(fmean(chunk_values))
            bands[label][0].append(min(chunk_values))
            bands[label][1].append(max(chunk_values))
        for name in index_names:
            defined = [element.indexes[name] for element in chunk
                       if name in element.indexes]
            if not defined:
                overlays[name].append(None)
            elif name == 'anomaly':
                overlays[name].append(max(defined))
            else:
                overlays[name].append(fmean(defined))
    return PlotSpec(series.tz, factor, labels, t_start, t_end, values, bands,
                    overlays)


#=============================
#  HTML rendering
#=============================

def island_payload(spec):
    """The versioned data-island dict embedded in rendered HTML. This is
    the whole contract with the chart script: version tag, zone name,
    epoch-millisecond timestamps, per-label values, optional per-label
    min/max bands and per-index overlays, all equally long."""
    payload = {
        'version': ISLAND_VERSION,
        'tz': spec.tz,
        'factor': spec.factor,
        'labels': spec.labels,
        'timestamps': [t * 1000.0 for t in spec.t_start],
        'values': spec.values,
        'bands': None,
        'overlays': spec.overlays,
    }
    if spec.bands is not None:
        payload['bands'] = {label: {'min': spec.bands[label][0],
                                    'max': spec.bands[label][1]}
                            for label in spec.labels}
    return payload


_FALLBACK_JS = """\
(function () {
  var island = document.getElementById('chart-data');
  var chart = document.getElementById('chart');
  if (!island || !chart) { return; }
  var data = JSON.parse(island.textContent);
  chart.textContent = 'chronoseries: ' + data.labels.join(', ') + ' (' +
    data.timestamps.length + ' plotted, aggregation factor ' + data.factor +
    '). Build the chart script for interactive plots.';
})();
"""


def _renderer_js():
    # The compiled interactive renderer ships as a package asset; without
    # it a tiny placeholder keeps the page valid and self-contained.
    try:
        from importlib import resources
        ref = resources.files('chronoseries').joinpath('assets/renderer.js')
        return ref.read_text(encoding='utf-8')
    except (FileNotFoundError, ModuleNotFoundError, TypeError):
        return _FALLBACK_JS


_HTML_TEMPLATE = """\
<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>chronoseries plot</title>
<style>
body {{ font-family: sans-serif; margin: 1.5em; }}
#chart {{ max-width: 960px; }}
</style>
</head>
<body>
<div id="chart"></div>
<script id="chart-data" type="application/json">{island}</script>
<script>{script}</script>
</body>
</html>
"""


def render_html(spec, path):
    """Write a fully self-contained HTML chart page.

    The page holds exactly one JSON data island and one inline script;
    nothing is fetched from anywhere.
    """
    island = json.dumps(island_payload(spec), allow_nan=False)
    island = island.replace('</', '<\\/')
    html = _HTML_TEMPLATE.format(island=island, script=_renderer_js())
    with open(path, 'w', encoding='utf-8') as stream:
        stream.write(html)
    return path


#=============================
#  Image rendering
#=============================

def _tick_positions(t_min, t_max, count=6):
    if t_max == t_min:
        return [t_min]
    step = (t_max - t_min) / (count - 1)
    return [t_min + i * step for i in range(count)]


def _tick_label(t, tzinfo):
    rendered = dt_from_t(t, tzinfo)
    return rendered.strftime('%Y-%m-%d\n%H:%M')


def render_image(spec, path, labels=None):
    """Draw the spec as a static image (PNG by extension default).

    Lines and their dispersion bands go on the value axis; data indexes
    go on a right-hand 0..1 axis, data_loss as a red area and the others
    as curves. Ticks are labeled in the spec's zone. `labels` restricts
    which data labels are drawn; an empty selection is an error.
    """
    from matplotlib.backends.backend_agg import FigureCanvasAgg
    from matplotlib.figure import Figure

    if labels is None:
        chosen = spec.labels
    else:
        chosen = list(labels)
        if not chosen:
            raise ValueError('empty label selection, nothing to draw')
        unknown = [label for label in chosen if label not in spec.labels]
        if unknown:
            raise KeyError(f'no such label(s) {unknown}: available {spec.labels}')

    tzinfo = timezonize(spec.tz)
    figure = Figure(figsize=(12.0, 5.0), dpi=100)
    FigureCanvasAgg(figure)
    axes = figure.add_subplot(111)
    colors = ['#1f77b4', '#2ca02c', '#9467bd', '#8c564b', '#e377c2',
              '#7f7f7f', '#bcbd22', '#17becf']
    x = spec.t_start
    for i, label in enumerate(chosen):
        color = colors[i % len(colors)]
        if spec.bands is not None:
            lows, highs = spec.bands[label]
            axes.fill_between(x, lows, highs, color=color, alpha=0.2,
                              linewidth=0)
        axes.plot(x, spec.values[label], color=color, linewidth=1.0,
                  label=label)
    axes.set_xlim(min(x), max(x) if max(x) > min(x) else min(x) + 1)
    ticks = _tick_positions(min(x), max(x))
    axes.set_xticks(ticks)
    axes.set_xticklabels([_tick_label(t, tzinfo) for t in ticks], fontsize=8)
    axes.set_xlabel(f'Time ({spec.tz})')
    axes.legend(loc='upper left', fontsize=8)

    if spec.overlays:
        overlay_axes = axes.twinx()
        overlay_axes.set_ylim(0.0, 1.0)
        overlay_axes.set_ylabel('index')
        for name, sequence in spec.overlays.items():
            cleaned = [math.nan if value is None else value for value in sequence]
            if name == 'data_loss':
                filled = [0.0 if value is None else value for value in sequence]
                overlay_axes.fill_between(x, 0.0, filled, color='red',
                                          alpha=0.3, linewidth=0, label=name)
            else:
                overlay_axes.plot(x, cleaned, linewidth=0.8, label=name,
                                  color='#ff7f0e' if name == 'anomaly' else '#555555')
        overlay_axes.legend(loc='upper right', fontsize=8)

    figure.tight_layout()
    figure.savefig(path, metadata={'Software': 'chronoseries'})
    return path
