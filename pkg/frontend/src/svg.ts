/**
 * Minimal deterministic SVG plotting primitives: no timestamps, no random
 * ids, fixed styling, so identical inputs produce identical bytes.
 */

export interface Extent {
  min: number;
  max: number;
}

export interface Scale {
  apply(v: number): number;
  ticks(): number[];
}

const WIDTH = 760;
const HEIGHT = 480;
const MARGIN = { top: 28, right: 24, bottom: 52, left: 76 };

export const PLOT = {
  width: WIDTH,
  height: HEIGHT,
  x0: MARGIN.left,
  x1: WIDTH - MARGIN.right,
  y0: HEIGHT - MARGIN.bottom,
  y1: MARGIN.top,
};

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

function fmt(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e5 || abs < 1e-3) return v.toExponential(1).replace("e+", "e");
  return Number(v.toPrecision(5)).toString();
}

export function pad(extent: Extent): Extent {
  if (extent.min === extent.max) {
    const d = extent.min === 0 ? 1 : Math.abs(extent.min) * 0.1;
    return { min: extent.min - d, max: extent.max + d };
  }
  return extent;
}

export function linearScale(domain: Extent, r0: number, r1: number): Scale {
  const d = pad(domain);
  const span = d.max - d.min;
  return {
    apply: (v) => r0 + ((v - d.min) / span) * (r1 - r0),
    ticks: () => {
      const step = niceStep(span / 5);
      const first = Math.ceil(d.min / step) * step;
      const out: number[] = [];
      for (let t = first; t <= d.max + 1e-12 * span; t += step) {
        out.push(Number(t.toPrecision(12)));
      }
      return out;
    },
  };
}

export function logScale(domain: Extent, r0: number, r1: number): Scale {
  const min = Math.max(domain.min, Number.MIN_VALUE);
  const max = Math.max(domain.max, min * 10);
  const lmin = Math.log10(min);
  const lmax = Math.log10(max);
  return {
    apply: (v) => r0 + ((Math.log10(Math.max(v, min)) - lmin) / (lmax - lmin)) * (r1 - r0),
    ticks: () => {
      const out: number[] = [];
      for (let e = Math.ceil(lmin); e <= Math.floor(lmax); e += 1) {
        out.push(10 ** e);
      }
      return out.length >= 2 ? out : [min, max];
    },
  };
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(raw));
  const unit = raw / mag;
  if (unit <= 1) return mag;
  if (unit <= 2) return 2 * mag;
  if (unit <= 5) return 5 * mag;
  return 10 * mag;
}

export interface Series {
  label: string;
  points: Array<[number, number]>;
  step?: boolean;
  dashed?: boolean;
  markers?: boolean;
}

export function renderScene(
  series: Series[],
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
  title: string,
): string {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="18" text-anchor="middle" font-size="13">${escapeXml(title)}</text>`,
  );

  for (const t of xScale.ticks()) {
    const x = xScale.apply(t).toFixed(2);
    parts.push(
      `<line x1="${x}" y1="${PLOT.y0}" x2="${x}" y2="${PLOT.y1}" stroke="#dddddd" stroke-width="1"/>`,
      `<text x="${x}" y="${PLOT.y0 + 18}" text-anchor="middle" font-size="10">${fmt(t)}</text>`,
    );
  }
  for (const t of yScale.ticks()) {
    const y = yScale.apply(t).toFixed(2);
    parts.push(
      `<line x1="${PLOT.x0}" y1="${y}" x2="${PLOT.x1}" y2="${y}" stroke="#dddddd" stroke-width="1"/>`,
      `<text x="${PLOT.x0 - 6}" y="${y}" text-anchor="end" dominant-baseline="middle" font-size="10">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<line x1="${PLOT.x0}" y1="${PLOT.y0}" x2="${PLOT.x1}" y2="${PLOT.y0}" stroke="black" stroke-width="1"/>`,
    `<line x1="${PLOT.x0}" y1="${PLOT.y0}" x2="${PLOT.x0}" y2="${PLOT.y1}" stroke="black" stroke-width="1"/>`,
    `<text x="${(PLOT.x0 + PLOT.x1) / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="11">${escapeXml(xLabel)}</text>`,
    `<text x="20" y="${(PLOT.y0 + PLOT.y1) / 2}" text-anchor="middle" font-size="11" transform="rotate(-90 20 ${(PLOT.y0 + PLOT.y1) / 2})">${escapeXml(yLabel)}</text>`,
  );

  series.forEach((s, k) => {
    const color = PALETTE[k % PALETTE.length];
    const coords = s.points.map(
      ([x, y]) => [xScale.apply(x), yScale.apply(y)] as [number, number],
    );
    if (coords.length > 0) {
      parts.push(
        `<path d="${pathData(coords, s.step === true)}" fill="none" stroke="${color}" stroke-width="1.6"${s.dashed ? ' stroke-dasharray="5,3"' : ""}/>`,
      );
    }
    if (s.markers) {
      for (const [x, y] of coords) {
        parts.push(`<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="2.4" fill="${color}"/>`);
      }
    }
    const ly = PLOT.y1 + 14 + 14 * k;
    parts.push(
      `<line x1="${PLOT.x1 - 150}" y1="${ly - 4}" x2="${PLOT.x1 - 126}" y2="${ly - 4}" stroke="${color}" stroke-width="1.6"${s.dashed ? ' stroke-dasharray="5,3"' : ""}/>`,
      `<text x="${PLOT.x1 - 120}" y="${ly}" font-size="10">${escapeXml(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function pathData(coords: Array<[number, number]>, step: boolean): string {
  const [first, ...rest] = coords;
  let d = `M ${first[0].toFixed(2)} ${first[1].toFixed(2)}`;
  let prevY = first[1];
  for (const [x, y] of rest) {
    if (step) {
      d += ` H ${x.toFixed(2)}`;
      if (y !== prevY) d += ` V ${y.toFixed(2)}`;
    } else {
      d += ` L ${x.toFixed(2)} ${y.toFixed(2)}`;
    }
    prevY = y;
  }
  return d;
}

function escapeXml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function extentOf(values: number[]): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  return { min, max };
}
