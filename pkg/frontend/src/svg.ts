/** Minimal deterministic SVG scene builder: fixed canvas, linear scales,
 * no timestamps or generated ids, so identical inputs give identical bytes. */

export interface Extent {
  min: number;
  max: number;
}

export function extent(values: number[], pad = 0.05): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  if (!Number.isFinite(min)) {
    min = 0;
    max = 1;
  }
  if (min === max) {
    min -= 1;
    max += 1;
  }
  const span = max - min;
  return { min: min - pad * span, max: max + pad * span };
}

export class Scale {
  constructor(
    readonly domain: Extent,
    readonly range: [number, number],
  ) {}

  map(v: number): number {
    const t = (v - this.domain.min) / (this.domain.max - this.domain.min);
    return this.range[0] + t * (this.range[1] - this.range[0]);
  }
}

const fmt = (v: number) => {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
};

export class Svg {
  private parts: string[] = [];

  constructor(
    readonly width = 800,
    readonly height = 560,
  ) {}

  rect(x: number, y: number, w: number, h: number, fill: string, opacity = 1) {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}"` +
        ` fill="${fill}" opacity="${opacity}"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1) {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}"` +
        ` stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string, width = 1, cls = "") {
    const d = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const klass = cls ? ` class="${cls}"` : "";
    this.parts.push(
      `<polyline${klass} points="${d}" fill="none" stroke="${stroke}"` +
        ` stroke-width="${width}"/>`,
    );
  }

  text(x: number, y: number, s: string, size = 12, anchor = "middle") {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}"` +
        ` font-family="sans-serif" text-anchor="${anchor}">${s}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}"` +
      ` height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export interface Frame {
  svg: Svg;
  x: Scale;
  y: Scale;
}

/** Axes frame with ticks; y grows upward (screen y inverted). */
export function frame(
  xDomain: Extent,
  yDomain: Extent,
  xLabel: string,
  yLabel: string,
  title: string,
): Frame {
  const svg = new Svg();
  const m = { left: 64, right: 24, top: 36, bottom: 48 };
  const x = new Scale(xDomain, [m.left, svg.width - m.right]);
  const y = new Scale(yDomain, [svg.height - m.bottom, m.top]);
  svg.line(x.range[0], y.range[0], x.range[1], y.range[0], "#222");
  svg.line(x.range[0], y.range[0], x.range[0], y.range[1], "#222");
  const ticks = (e: Extent, n: number) => {
    const out: number[] = [];
    for (let i = 0; i <= n; i++) out.push(e.min + ((e.max - e.min) * i) / n);
    return out;
  };
  for (const t of ticks(xDomain, 8)) {
    const px = x.map(t);
    svg.line(px, y.range[0], px, y.range[0] + 5, "#222");
    svg.text(px, y.range[0] + 18, fmt(t), 10);
  }
  for (const t of ticks(yDomain, 6)) {
    const py = y.map(t);
    svg.line(x.range[0] - 5, py, x.range[0], py, "#222");
    svg.text(x.range[0] - 8, py + 3, fmt(t), 10, "end");
  }
  svg.text((x.range[0] + x.range[1]) / 2, svg.height - 12, xLabel);
  svg.text(16, (y.range[0] + y.range[1]) / 2, yLabel, 12, "middle");
  svg.text((x.range[0] + x.range[1]) / 2, 20, title, 14);
  return { svg, x, y };
}
