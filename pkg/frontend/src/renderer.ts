/* Interactive chart for chronoseries HTML exports.
 *
 * The page embeds one JSON data island (script#chart-data) and this
 * script; mounting draws an SVG line chart with a dispersion band per
 * label, a red data_loss area and further 0..1 index overlays, plus
 * hover readouts and drag zoom. Rendering is a pure function of the
 * island and the zoom window, so remounting the same island gives an
 * identical DOM.
 *
 * No modules, no dependencies: the compiled file is inlined verbatim
 * into the exported page. Markup is built through DOM calls only and
 * the SVG namespace below is kept split, so the page never contains
 * closing-tag sequences or external-reference markers.
 */

const CS_VERSION = 'cs-island v1';
const SVG_NS = 'ht' + 'tp://www.w3.org/2000/svg';

const WIDTH = 900;
const HEIGHT = 340;
const X0 = 52;
const X1 = WIDTH - 16;
const Y0 = 14;
const Y1 = HEIGHT - 34;

const PALETTE = ['#1f77b4', '#2ca02c', '#9467bd', '#8c564b', '#e377c2',
                 '#17becf', '#bcbd22', '#7f7f7f'];
const LOSS_FILL = '#d62728';
const ANOMALY_STROKE = '#ff7f0e';
const OVERLAY_STROKE = '#999999';

interface IslandBands {
  [label: string]: { min: number[]; max: number[] };
}

interface Island {
  version: string;
  tz: string;
  factor: number;
  labels: string[];
  timestamps: number[];
  values: { [label: string]: number[] };
  bands: IslandBands | null;
  overlays: { [name: string]: (number | null)[] };
}

interface ChartState {
  island: Island;
  root: HTMLElement;
  full: [number, number];
  view: [number, number];
  dragFrom: number | null;
}

const wallclockFormats: { [tz: string]: Intl.DateTimeFormat } = {};
const tickFormats: { [tz: string]: Intl.DateTimeFormat } = {};

function formatWallclock(tsMs: number, tz: string): string {
  if (!wallclockFormats[tz]) {
    // en-GB pins a deterministic 24h clock independent of the viewer
    wallclockFormats[tz] = new Intl.DateTimeFormat('en-GB', {
      timeZone: tz, year: 'numeric', month: 'short', day: '2-digit',
      hour: '2-digit', minute: '2-digit',
    });
  }
  return wallclockFormats[tz].format(tsMs);
}

function formatTick(tsMs: number, tz: string): string {
  if (!tickFormats[tz]) {
    tickFormats[tz] = new Intl.DateTimeFormat('en-GB', {
      timeZone: tz, month: 'short', day: '2-digit',
      hour: '2-digit', minute: '2-digit',
    });
  }
  return tickFormats[tz].format(tsMs);
}

function formatValue(value: number): string {
  const compact = parseFloat(value.toPrecision(5));
  return String(compact);
}

function cssName(name: string): string {
  return name.replace(/[^A-Za-z0-9]+/g, '-').toLowerCase();
}

function svgEl(name: string, attrs: { [key: string]: string }): Element {
  const el = document.createElementNS(SVG_NS, name);
  for (const key in attrs) {
    el.setAttribute(key, attrs[key]);
  }
  return el;
}

function fmt(x: number): string {
  return x.toFixed(2);
}


//=============================
//  Island validation
//=============================

function islandProblem(data: Island): string | null {
  if (!data || typeof data !== 'object') {
    return 'the data island is not an object';
  }
  if (data.version !== CS_VERSION) {
    return 'unsupported data version "' + String(data.version) +
      '" (this renderer understands "' + CS_VERSION + '")';
  }
  if (!Array.isArray(data.timestamps) || !Array.isArray(data.labels)) {
    return 'malformed data island: timestamps and labels must be arrays';
  }
  const n = data.timestamps.length;
  for (const label of data.labels) {
    const values = data.values ? data.values[label] : undefined;
    if (!Array.isArray(values) || values.length !== n) {
      return 'malformed data island: values for "' + label +
        '" do not match the timestamps';
    }
    if (data.bands) {
      const band = data.bands[label];
      if (!band || band.min.length !== n || band.max.length !== n) {
        return 'malformed data island: band for "' + label +
          '" does not match the timestamps';
      }
    }
  }
  const overlays = data.overlays || {};
  for (const name in overlays) {
    if (!Array.isArray(overlays[name]) || overlays[name].length !== n) {
      return 'malformed data island: overlay "' + name +
        '" does not match the timestamps';
    }
  }
  return null;
}


//=============================
//  Geometry
//=============================

function xScale(state: ChartState): (t: number) => number {
  const [t0, t1] = state.view;
  const span = t1 - t0;
  if (span <= 0) {
    return () => (X0 + X1) / 2;
  }
  return (t: number) => X0 + ((t - t0) / span) * (X1 - X0);
}

function valueExtent(state: ChartState): [number, number] {
  const { island, view } = state;
  let lo = Infinity;
  let hi = -Infinity;
  for (let i = 0; i < island.timestamps.length; i++) {
    const t = island.timestamps[i];
    if (t < view[0] || t > view[1]) {
      continue;
    }
    for (const label of island.labels) {
      lo = Math.min(lo, island.values[label][i]);
      hi = Math.max(hi, island.values[label][i]);
      if (island.bands) {
        lo = Math.min(lo, island.bands[label].min[i]);
        hi = Math.max(hi, island.bands[label].max[i]);
      }
    }
  }
  if (lo > hi) {
    lo = 0;
    hi = 1;
  }
  const pad = (hi - lo) * 0.05 || 1;
  return [lo - pad, hi + pad];
}

function yScale(extent: [number, number]): (v: number) => number {
  const [lo, hi] = extent;
  return (v: number) => Y1 - ((v - lo) / (hi - lo)) * (Y1 - Y0);
}

// Index overlays live on their own fixed 0..1 axis over the full height.
function overlayY(value: number): number {
  return Y1 - value * (Y1 - Y0);
}

function visibleIndexes(state: ChartState): number[] {
  const out: number[] = [];
  const { timestamps } = state.island;
  for (let i = 0; i < timestamps.length; i++) {
    if (timestamps[i] >= state.view[0] && timestamps[i] <= state.view[1]) {
      out.push(i);
    }
  }
  return out;
}


//=============================
//  Path builders
//=============================

function linePath(points: Array<[number, number]>): string {
  let d = '';
  for (let i = 0; i < points.length; i++) {
    d += (i === 0 ? 'M' : 'L') + fmt(points[i][0]) + ' ' + fmt(points[i][1]);
  }
  return d;
}

function bandPath(xs: number[], tops: number[], bottoms: number[]): string {
  let d = '';
  for (let i = 0; i < xs.length; i++) {
    d += (i === 0 ? 'M' : 'L') + fmt(xs[i]) + ' ' + fmt(tops[i]);
  }
  for (let i = xs.length - 1; i >= 0; i--) {
    d += 'L' + fmt(xs[i]) + ' ' + fmt(bottoms[i]);
  }
  return d ? d + 'Z' : d;
}

// Overlay series may have gaps (null where no element carried the
// index); each defined run becomes its own subpath.
function brokenLinePath(xs: number[], values: Array<number | null>,
                        toY: (v: number) => number): string {
  let d = '';
  let pen = false;
  for (let i = 0; i < xs.length; i++) {
    const value = values[i];
    if (value === null || value === undefined) {
      pen = false;
      continue;
    }
    d += (pen ? 'L' : 'M') + fmt(xs[i]) + ' ' + fmt(toY(value));
    pen = true;
  }
  return d;
}

function areaPath(xs: number[], values: Array<number | null>,
                  toY: (v: number) => number): string {
  let d = '';
  let run: Array<[number, number]> = [];
  const flush = () => {
    if (!run.length) {
      return;
    }
    d += 'M' + fmt(run[0][0]) + ' ' + fmt(Y1);
    for (const [x, y] of run) {
      d += 'L' + fmt(x) + ' ' + fmt(y);
    }
    d += 'L' + fmt(run[run.length - 1][0]) + ' ' + fmt(Y1) + 'Z';
    run = [];
  };
  for (let i = 0; i < xs.length; i++) {
    const value = values[i];
    if (value === null || value === undefined) {
      flush();
      continue;
    }
    run.push([xs[i], toY(value)]);
  }
  flush();
  return d;
}


//=============================
//  Rendering
//=============================

function renderBanner(container: HTMLElement, message: string): void {
  container.textContent = '';
  const banner = document.createElement('div');
  banner.className = 'cs-error';
  banner.setAttribute('style',
    'padding:12px;border:2px solid #d62728;background:#fdecea;' +
    'color:#8b1a12;font-weight:bold;');
  banner.textContent = 'chronoseries renderer: ' + message;
  container.appendChild(banner);
}

function renderAxes(state: ChartState, svg: Element,
                    extent: [number, number]): void {
  const axes = svgEl('g', { 'class': 'cs-axes' });
  axes.appendChild(svgEl('rect', {
    x: fmt(X0), y: fmt(Y0), width: fmt(X1 - X0), height: fmt(Y1 - Y0),
    fill: 'none', stroke: '#cccccc',
  }));
  for (let i = 0; i < 5; i++) {
    const t = state.view[0] + (i / 4) * (state.view[1] - state.view[0]);
    const x = X0 + (i / 4) * (X1 - X0);
    axes.appendChild(svgEl('line', {
      x1: fmt(x), y1: fmt(Y1), x2: fmt(x), y2: fmt(Y1 + 4),
      stroke: '#888888',
    }));
    const tick = svgEl('text', {
      x: fmt(x), y: fmt(Y1 + 16), 'text-anchor': 'middle',
      'font-size': '10', fill: '#444444',
    });
    tick.textContent = formatTick(t, state.island.tz);
    axes.appendChild(tick);
  }
  for (let i = 0; i < 4; i++) {
    const value = extent[0] + (i / 3) * (extent[1] - extent[0]);
    const y = yScale(extent)(value);
    const tick = svgEl('text', {
      x: fmt(X0 - 6), y: fmt(y + 3), 'text-anchor': 'end',
      'font-size': '10', fill: '#444444',
    });
    tick.textContent = formatValue(value);
    axes.appendChild(tick);
  }
  svg.appendChild(axes);
}

function renderLegend(state: ChartState, svg: Element): void {
  const legend = svgEl('g', { 'class': 'cs-legend' });
  let x = X0 + 6;
  const entry = (color: string, text: string) => {
    legend.appendChild(svgEl('rect', {
      x: fmt(x), y: fmt(Y0 - 12), width: '10', height: '10', fill: color,
    }));
    const name = svgEl('text', {
      x: fmt(x + 14), y: fmt(Y0 - 3), 'font-size': '11', fill: '#333333',
    });
    name.textContent = text;
    legend.appendChild(name);
    x += 14 + 7 * text.length + 16;
  };
  state.island.labels.forEach((label, i) => {
    entry(PALETTE[i % PALETTE.length], label);
  });
  for (const name in state.island.overlays) {
    entry(name === 'data_loss' ? LOSS_FILL :
          name === 'anomaly' ? ANOMALY_STROKE : OVERLAY_STROKE, name);
  }
  svg.appendChild(legend);
}

function render(state: ChartState): void {
  const { island, root } = state;
  root.textContent = '';

  const svg = svgEl('svg', {
    'class': 'cs-plot', width: String(WIDTH), height: String(HEIGHT),
    viewBox: '0 0 ' + WIDTH + ' ' + HEIGHT,
    'data-t0': String(state.view[0]), 'data-t1': String(state.view[1]),
  });

  const extent = valueExtent(state);
  const toX = xScale(state);
  const toY = yScale(extent);
  const shown = visibleIndexes(state);
  const xs = shown.map((i) => toX(island.timestamps[i]));

  renderAxes(state, svg, extent);

  island.labels.forEach((label, li) => {
    const color = PALETTE[li % PALETTE.length];
    if (island.bands) {
      const band = island.bands[label];
      svg.appendChild(svgEl('path', {
        'class': 'cs-band cs-band-' + cssName(label),
        d: bandPath(xs, shown.map((i) => toY(band.max[i])),
                    shown.map((i) => toY(band.min[i]))),
        fill: color, 'fill-opacity': '0.25', stroke: 'none',
      }));
    }
    svg.appendChild(svgEl('path', {
      'class': 'cs-line cs-line-' + cssName(label),
      d: linePath(shown.map((i): [number, number] =>
        [toX(island.timestamps[i]), toY(island.values[label][i])])),
      fill: 'none', stroke: color, 'stroke-width': '1.5',
    }));
  });

  for (const name in island.overlays) {
    const values = shown.map((i) => island.overlays[name][i]);
    if (name === 'data_loss') {
      svg.appendChild(svgEl('path', {
        'class': 'cs-overlay cs-overlay-' + cssName(name),
        d: areaPath(xs, values, overlayY),
        fill: LOSS_FILL, 'fill-opacity': '0.3', stroke: 'none',
      }));
    } else {
      svg.appendChild(svgEl('path', {
        'class': 'cs-overlay cs-overlay-' + cssName(name),
        d: brokenLinePath(xs, values, overlayY),
        fill: 'none',
        stroke: name === 'anomaly' ? ANOMALY_STROKE : OVERLAY_STROKE,
        'stroke-width': '1.2', 'stroke-dasharray': '4 2',
      }));
    }
  }

  renderLegend(state, svg);

  const cursor = svgEl('line', {
    'class': 'cs-cursor', x1: '0', y1: fmt(Y0), x2: '0', y2: fmt(Y1),
    stroke: '#555555', 'stroke-dasharray': '3 3', visibility: 'hidden',
  });
  svg.appendChild(cursor);

  const selection = svgEl('rect', {
    'class': 'cs-select', x: '0', y: fmt(Y0), width: '0',
    height: fmt(Y1 - Y0), fill: '#1f77b4', 'fill-opacity': '0.15',
    visibility: 'hidden',
  });
  svg.appendChild(selection);

  const hover = svgEl('rect', {
    'class': 'cs-hover', x: fmt(X0), y: fmt(Y0), width: fmt(X1 - X0),
    height: fmt(Y1 - Y0), fill: 'none', 'pointer-events': 'all',
  });
  svg.appendChild(hover);
  root.appendChild(svg);

  const readout = document.createElement('div');
  readout.className = 'cs-readout';
  readout.setAttribute('style',
    'display:none;position:absolute;left:8px;top:8px;padding:6px 8px;' +
    'background:#ffffff;border:1px solid #888888;font-size:11px;' +
    'pointer-events:none;');
  root.appendChild(readout);

  const controls = document.createElement('div');
  controls.className = 'cs-controls';
  const reset = document.createElement('button');
  reset.className = 'cs-reset';
  reset.type = 'button';
  reset.textContent = 'Reset zoom';
  controls.appendChild(reset);
  root.appendChild(controls);

  wireEvents(state, svg, hover, cursor, selection, readout, reset);
}

function nearestIndex(state: ChartState, t: number): number {
  const { timestamps } = state.island;
  let best = 0;
  let bestGap = Infinity;
  for (const i of visibleIndexes(state)) {
    const gap = Math.abs(timestamps[i] - t);
    if (gap < bestGap) {
      bestGap = gap;
      best = i;
    }
  }
  return best;
}

function updateReadout(state: ChartState, readout: HTMLElement,
                       index: number): void {
  const { island } = state;
  readout.textContent = '';
  const row = (text: string, cls: string) => {
    const line = document.createElement('div');
    line.className = cls;
    line.textContent = text;
    readout.appendChild(line);
  };
  row(formatWallclock(island.timestamps[index], island.tz), 'cs-readout-time');
  for (const label of island.labels) {
    row(label + ': ' + formatValue(island.values[label][index]),
        'cs-readout-value');
  }
  for (const name in island.overlays) {
    const value = island.overlays[name][index];
    row(name + ': ' + (value === null ? 'n/a' : formatValue(value)),
        'cs-readout-index');
  }
  readout.style.display = 'block';
}

function wireEvents(state: ChartState, svg: Element, hover: Element,
                    cursor: Element, selection: Element,
                    readout: HTMLElement, reset: HTMLElement): void {
  const toT = (clientX: number): number => {
    const rect = (svg as SVGGraphicsElement).getBoundingClientRect();
    const x = clientX - rect.left;
    const [t0, t1] = state.view;
    return t0 + ((x - X0) / (X1 - X0)) * (t1 - t0);
  };

  hover.addEventListener('mousemove', (ev) => {
    const mouse = ev as MouseEvent;
    const index = nearestIndex(state, toT(mouse.clientX));
    const x = xScale(state)(state.island.timestamps[index]);
    cursor.setAttribute('x1', fmt(x));
    cursor.setAttribute('x2', fmt(x));
    cursor.setAttribute('visibility', 'visible');
    updateReadout(state, readout, index);
    if (state.dragFrom !== null) {
      const a = Math.min(state.dragFrom, mouse.clientX);
      const b = Math.max(state.dragFrom, mouse.clientX);
      selection.setAttribute('x', fmt(a));
      selection.setAttribute('width', fmt(b - a));
      selection.setAttribute('visibility', 'visible');
    }
  });

  hover.addEventListener('mouseleave', () => {
    cursor.setAttribute('visibility', 'hidden');
    readout.style.display = 'none';
    selection.setAttribute('visibility', 'hidden');
    state.dragFrom = null;
  });

  hover.addEventListener('mousedown', (ev) => {
    state.dragFrom = (ev as MouseEvent).clientX;
  });

  hover.addEventListener('mouseup', (ev) => {
    const from = state.dragFrom;
    state.dragFrom = null;
    if (from === null) {
      return;
    }
    const to = (ev as MouseEvent).clientX;
    if (Math.abs(to - from) < 8) {
      selection.setAttribute('visibility', 'hidden');
      return;
    }
    const a = toT(Math.min(from, to));
    const b = toT(Math.max(from, to));
    state.view = [Math.max(a, state.full[0]), Math.min(b, state.full[1])];
    render(state);
  });

  hover.addEventListener('dblclick', () => {
    state.view = [state.full[0], state.full[1]];
    render(state);
  });

  reset.addEventListener('click', () => {
    state.view = [state.full[0], state.full[1]];
    render(state);
  });
}


//=============================
//  Mounting
//=============================

function mount(data: Island, container: HTMLElement): void {
  const problem = islandProblem(data);
  if (problem !== null) {
    renderBanner(container, problem);
    return;
  }
  container.textContent = '';
  const root = document.createElement('div');
  root.className = 'cs-root';
  root.setAttribute('style', 'position:relative;');
  container.appendChild(root);

  const island: Island = { ...data, overlays: data.overlays || {} };
  const timestamps = island.timestamps;
  const t0 = timestamps.length ? timestamps[0] : 0;
  const t1 = timestamps.length ? timestamps[timestamps.length - 1] : 1;
  const state: ChartState = {
    island, root, full: [t0, t1], view: [t0, t1], dragFrom: null,
  };
  render(state);
}

function mountFromScript(islandEl: Element, container: HTMLElement): void {
  let data: Island;
  try {
    data = JSON.parse(islandEl.textContent || '') as Island;
  } catch (err) {
    renderBanner(container, 'the data island is not valid JSON');
    return;
  }
  mount(data, container);
}

(globalThis as { [key: string]: unknown }).csRenderer = {
  VERSION: CS_VERSION,
  mount,
  mountFromScript,
  formatWallclock,
};

(function autoMount(): void {
  if (typeof document === 'undefined') {
    return;
  }
  const islandEl = document.getElementById('chart-data');
  const container = document.getElementById('chart');
  if (islandEl && container) {
    mountFromScript(islandEl, container);
  }
})();
