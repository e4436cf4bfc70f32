import { beforeEach, describe, expect, it, vi } from 'vitest';

import humitempIsland from './fixtures/humitemp-island.json';

import '../src/renderer';

const cs = (globalThis as any).csRenderer;

function island(overrides: any = {}): any {
  return {
    version: 'cs-island v1',
    tz: 'UTC',
    factor: 1,
    labels: ['value'],
    timestamps: [0, 3600000, 7200000, 10800000],
    values: { value: [1, 2, 3, 2.5] },
    bands: null,
    overlays: {},
    ...overrides,
  };
}

function mountInto(data: any): HTMLElement {
  const target = document.createElement('div');
  document.body.appendChild(target);
  cs.mount(data, target);
  return target;
}

function mouse(el: Element, type: string, clientX: number): void {
  el.dispatchEvent(new MouseEvent(type, { clientX, bubbles: true }));
}

beforeEach(() => {
  document.body.innerHTML = '';
});


describe('mounting the humitemp island', () => {
  it('draws one dispersion band and one line per label', () => {
    const target = mountInto(humitempIsland);
    expect(target.querySelectorAll('.cs-band').length).toBe(2);
    expect(target.querySelectorAll('.cs-line').length).toBe(2);
    for (const label of (humitempIsland as any).labels) {
      const safe = label.replace(/[^A-Za-z0-9]+/g, '-').toLowerCase();
      expect(target.querySelector('.cs-line-' + safe)).not.toBeNull();
      expect(target.querySelector('.cs-band-' + safe)).not.toBeNull();
    }
  });

  it('draws the data_loss overlay', () => {
    const target = mountInto(humitempIsland);
    const overlay = target.querySelector('.cs-overlay-data-loss');
    expect(overlay).not.toBeNull();
    expect(overlay!.getAttribute('fill')).toBe('#d62728');
    expect(overlay!.getAttribute('d')!.length).toBeGreaterThan(0);
  });

  it('keeps each band under its line', () => {
    const target = mountInto(humitempIsland);
    const children = Array.from(target.querySelector('svg')!.children);
    for (const label of (humitempIsland as any).labels) {
      const safe = label.replace(/[^A-Za-z0-9]+/g, '-').toLowerCase();
      const band = children.indexOf(target.querySelector('.cs-band-' + safe)!);
      const line = children.indexOf(target.querySelector('.cs-line-' + safe)!);
      expect(band).toBeGreaterThanOrEqual(0);
      expect(band).toBeLessThan(line);
    }
  });

  it('remounts snapshot-identical', () => {
    const first = mountInto(humitempIsland);
    const second = mountInto(humitempIsland);
    expect(first.innerHTML.length).toBeGreaterThan(10000);
    expect(second.innerHTML).toBe(first.innerHTML);
  });
});


describe('small islands', () => {
  it('one label and no indexes give a single line and nothing else', () => {
    const target = mountInto(island());
    expect(target.querySelectorAll('.cs-line').length).toBe(1);
    expect(target.querySelectorAll('.cs-band').length).toBe(0);
    expect(target.querySelectorAll('.cs-overlay').length).toBe(0);
  });

  it('all-zero data_loss stays present but flat on the baseline', () => {
    const target = mountInto(island({ overlays: { data_loss: [0, 0, 0, 0] } }));
    const overlay = target.querySelector('.cs-overlay-data-loss')!;
    const path = overlay.getAttribute('d')!;
    const ys = Array.from(path.matchAll(/[ML][\d.]+ ([\d.]+)/g),
                          (hit) => hit[1]);
    expect(ys.length).toBeGreaterThan(0);
    expect(new Set(ys)).toEqual(new Set(['306.00']));
  });

  it('null overlay stretches break the anomaly curve into runs', () => {
    const target = mountInto(
      island({ overlays: { anomaly: [0.1, null, 0.5, 0.9] } }));
    const path = target.querySelector('.cs-overlay-anomaly')!
      .getAttribute('d')!;
    expect(path.match(/M/g)!.length).toBe(2);
  });

  it('renders a fixed structure', () => {
    const target = mountInto(island({
      bands: { value: { min: [0.5, 1.5, 2.5, 2], max: [1.5, 2.5, 3.5, 3] } },
      overlays: { data_loss: [0, 0.25, null, 1], anomaly: [null, 0.1, 0.9, null] },
    }));
    expect(target.innerHTML).toMatchSnapshot();
  });
});


describe('version handling', () => {
  it('a version mismatch shows a banner and renders nothing else', () => {
    const target = mountInto(island({ version: 'cs-island v9' }));
    const banner = target.querySelector('.cs-error');
    expect(banner).not.toBeNull();
    expect(banner!.textContent).toContain('cs-island v9');
    expect(banner!.textContent).toContain('cs-island v1');
    expect(target.querySelector('svg')).toBeNull();
    expect(target.children.length).toBe(1);
  });

  it('mismatched array lengths are refused the same way', () => {
    const target = mountInto(island({ values: { value: [1, 2] } }));
    expect(target.querySelector('.cs-error')!.textContent)
      .toContain('values for "value"');
    expect(target.querySelector('svg')).toBeNull();
  });

  it('broken island JSON is refused the same way', () => {
    const islandEl = document.createElement('script');
    islandEl.textContent = 'not json';
    const target = document.createElement('div');
    cs.mountFromScript(islandEl, target);
    expect(target.querySelector('.cs-error')!.textContent)
      .toContain('not valid JSON');
  });
});


describe('hover readout', () => {
  it('shows the wall-clock time in the island zone, not the local one', () => {
    const target = mountInto(island({
      tz: 'Asia/Tokyo',
      overlays: { data_loss: [0, 0.5, 0.25, 1] },
    }));
    mouse(target.querySelector('.cs-hover')!, 'mousemove', 60);

    const readout = target.querySelector('.cs-readout') as HTMLElement;
    expect(readout.style.display).toBe('block');
    const time = readout.querySelector('.cs-readout-time')!.textContent!;
    expect(time).toBe(cs.formatWallclock(0, 'Asia/Tokyo'));
    expect(time).toContain('09:00');
    expect(readout.textContent).toContain('value: 1');
    expect(readout.textContent).toContain('data_loss: 0');
  });

  it('hides again when the pointer leaves', () => {
    const target = mountInto(island());
    const hover = target.querySelector('.cs-hover')!;
    mouse(hover, 'mousemove', 400);
    hover.dispatchEvent(new MouseEvent('mouseleave', { bubbles: true }));
    const readout = target.querySelector('.cs-readout') as HTMLElement;
    expect(readout.style.display).toBe('none');
  });

  it('formats wall-clock times with the island zone offset', () => {
    const winter = Date.UTC(2019, 0, 3, 2, 0);
    expect(cs.formatWallclock(winter, 'Europe/Rome')).toContain('03 Jan 2019');
    expect(cs.formatWallclock(winter, 'Europe/Rome')).toContain('03:00');
    expect(cs.formatWallclock(winter, 'UTC')).toContain('02:00');
  });
});


describe('drag zoom', () => {
  it('narrows the view and reset restores it', () => {
    const target = mountInto(island());
    const viewOf = () => {
      const svg = target.querySelector('svg.cs-plot')!;
      return [svg.getAttribute('data-t0'), svg.getAttribute('data-t1')];
    };
    const initial = viewOf();

    let hover = target.querySelector('.cs-hover')!;
    mouse(hover, 'mousedown', 200);
    mouse(hover, 'mousemove', 600);
    mouse(hover, 'mouseup', 600);

    const zoomed = viewOf();
    expect(zoomed).not.toEqual(initial);
    expect(Number(zoomed[0])).toBeGreaterThan(Number(initial[0]));
    expect(Number(zoomed[1])).toBeLessThan(Number(initial[1]));

    (target.querySelector('.cs-reset') as HTMLElement).click();
    expect(viewOf()).toEqual(initial);
  });

  it('ignores sub-threshold drags', () => {
    const target = mountInto(island());
    const svg = target.querySelector('svg.cs-plot')!;
    const hover = target.querySelector('.cs-hover')!;
    mouse(hover, 'mousedown', 400);
    mouse(hover, 'mouseup', 403);
    expect(target.querySelector('svg.cs-plot')).toBe(svg);
  });
});


describe('auto-mount', () => {
  it('mounts by itself when the page holds an island and a chart div', async () => {
    const islandEl = document.createElement('script');
    islandEl.id = 'chart-data';
    islandEl.setAttribute('type', 'application/json');
    islandEl.textContent = JSON.stringify(island());
    const target = document.createElement('div');
    target.id = 'chart';
    document.body.appendChild(target);
    document.body.appendChild(islandEl);

    vi.resetModules();
    await import('../src/renderer');
    expect(target.querySelector('svg.cs-plot')).not.toBeNull();
  });
});
