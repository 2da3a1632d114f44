import { Table, column, textColumn, hasColumn } from "./csv.js";
import { Extent, Svg, extent, frame } from "./svg.js";

const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];
const KINK_THRESHOLD = 0.5;

export interface PathsOptions {
  /** pointer window override: [center, halfwidth, t_w] */
  window?: [number, number, number];
  title?: string;
}

interface TwoLeg {
  xi: number;
  w: number;
  xf: number;
  tw: number;
  tf: number;
  pIn: number;
  pOut: number;
}

function collectLegs(table: Table): TwoLeg[] {
  const ids = column(table, "traj_id");
  const legs = textColumn(table, "leg");
  const xs = column(table, "x_start");
  const ts = column(table, "t_start");
  const xe = column(table, "x_end");
  const te = column(table, "t_end");
  const p = column(table, "p");
  const byId = new Map<number, Partial<TwoLeg>>();
  for (let i = 0; i < ids.length; i++) {
    const entry = byId.get(ids[i]) ?? {};
    if (legs[i] === "in") {
      entry.xi = xs[i];
      entry.w = xe[i];
      entry.tw = te[i];
      entry.pIn = p[i];
    } else {
      entry.xf = xe[i];
      entry.tf = te[i];
      entry.pOut = p[i];
    }
    byId.set(ids[i], entry);
  }
  const out: TwoLeg[] = [];
  for (const entry of byId.values()) {
    if (
      entry.xi !== undefined &&
      entry.xf !== undefined &&
      entry.w !== undefined
    ) {
      out.push(entry as TwoLeg);
    }
  }
  return out;
}

/** Space-time diagram of two-leg path bundles with the pointer window box. */
export function renderPaths(table: Table, opts: PathsOptions = {}): string {
  const legs = collectLegs(table);
  const xsAll = legs.flatMap((l) => [l.xi, l.w, l.xf]);
  const tsAll = legs.flatMap((l) => [0, l.tw, l.tf]);
  if (opts.window) {
    xsAll.push(opts.window[0] - opts.window[1], opts.window[0] + opts.window[1]);
    tsAll.push(opts.window[2]);
  }
  if (xsAll.length === 0) {
    xsAll.push(-1, 1);
    tsAll.push(0, 1);
  }
  const f = frame(
    extent(xsAll),
    extent(tsAll),
    "x (a.u.)",
    "t (a.u.)",
    opts.title ?? "weak-trajectory bundle",
  );
  // pointer window: explicit override, else the in-leg endpoint cluster
  let box: [number, number, number] | null = opts.window ?? null;
  if (!box && legs.length > 0) {
    const ws = legs.map((l) => l.w);
    const lo = Math.min(...ws);
    const hi = Math.max(...ws);
    box = [(lo + hi) / 2, Math.max((hi - lo) / 2, 0.25), legs[0].tw];
  }
  if (box) {
    const [c, half, tw] = box;
    const x0 = f.x.map(c - half);
    const x1 = f.x.map(c + half);
    const y0 = f.y.map(tw + 0.2);
    const y1 = f.y.map(tw - 0.2);
    f.svg.rect(x0, y0, x1 - x0, y1 - y0, "#888888", 0.55);
  }
  for (const l of legs) {
    const kinked = Math.abs(l.pOut - l.pIn) > KINK_THRESHOLD;
    f.svg.polyline(
      [
        [f.x.map(l.xi), f.y.map(0)],
        [f.x.map(l.w), f.y.map(l.tw)],
        [f.x.map(l.xf), f.y.map(l.tf)],
      ],
      kinked ? "#d62728" : "#1f77b4",
      1,
      kinked ? "path kinked" : "path",
    );
  }
  return f.svg.render();
}

/** Trajectory fan x(t); crossing trajectories highlighted. */
export function renderTrajectories(tables: Table[], title = "trajectories"): string {
  const series: Array<{ t: number[]; x: number[]; crossed: boolean }> = [];
  for (const table of tables) {
    const ids = column(table, "traj_id");
    const ts = column(table, "t");
    const xs = column(table, "x");
    const crossed = hasColumn(table, "crossed")
      ? column(table, "crossed")
      : ids.map(() => 0);
    const byId = new Map<number, { t: number[]; x: number[]; crossed: boolean }>();
    for (let i = 0; i < ids.length; i++) {
      let s = byId.get(ids[i]);
      if (!s) {
        s = { t: [], x: [], crossed: false };
        byId.set(ids[i], s);
      }
      s.t.push(ts[i]);
      s.x.push(xs[i]);
      if (crossed[i] !== 0) s.crossed = true;
    }
    series.push(...byId.values());
  }
  const f = frame(
    extent(series.flatMap((s) => s.x)),
    extent(series.flatMap((s) => s.t)),
    "x (a.u.)",
    "t (a.u.)",
    title,
  );
  // midpoint guide
  const zx = f.x.map(0);
  f.svg.line(zx, f.y.range[0], zx, f.y.range[1], "#cccccc");
  for (const s of series) {
    const pts = s.t.map((t, i) => [f.x.map(s.x[i]), f.y.map(t)] as [number, number]);
    f.svg.polyline(
      pts,
      s.crossed ? "#d62728" : "#1f77b4",
      s.crossed ? 1.6 : 1,
      s.crossed ? "traj crossed" : "traj",
    );
  }
  return f.svg.render();
}

/** Weak-value sweep: Re, Im and |A| against the window position. */
export function renderScan(tables: Table[], title = "weak-value scan"): string {
  const first = tables[0];
  const w = column(first, "w");
  const parts = ["re_A", "im_A", "abs_A"] as const;
  const all: number[] = [];
  for (const t of tables) for (const p of parts) all.push(...column(t, p));
  const f = frame(extent(w), extent(all), "w (a.u.)", "weak value", title);
  let k = 0;
  for (const table of tables) {
    const wi = column(table, "w");
    for (const p of parts) {
      const v = column(table, p);
      const pts = wi.map(
        (x, i) => [f.x.map(x), f.y.map(v[i])] as [number, number],
      );
      f.svg.polyline(pts, SERIES_COLORS[k % SERIES_COLORS.length], 1.2, p);
      k += 1;
    }
  }
  const y0 = f.y.map(0);
  f.svg.line(f.x.range[0], y0, f.x.range[1], y0, "#cccccc");
  f.svg.text(f.x.range[1] - 8, f.y.range[1] + 14, "re / im / abs", 10, "end");
  return f.svg.render();
}

/** Shift-law study: log10 of shift, prediction and residual against log10 g. */
export function renderShiftScaling(table: Table, title = "pointer-shift scaling"): string {
  const g = column(table, "g");
  const shift = column(table, "shift");
  const pred = column(table, "g_re_aw");
  const resid = column(table, "residual");
  const lg = g.map(Math.log10);
  const series = [
    { name: "shift", v: shift.map((s) => Math.log10(Math.abs(s))) },
    { name: "g_re_aw", v: pred.map((s) => Math.log10(Math.abs(s))) },
    { name: "residual", v: resid.map((s) => Math.log10(Math.abs(s))) },
  ];
  const f = frame(
    extent(lg),
    extent(series.flatMap((s) => s.v)),
    "log10 g",
    "log10 |value|",
    title,
  );
  series.forEach((s, k) => {
    const pts = lg.map((x, i) => [f.x.map(x), f.y.map(s.v[i])] as [number, number]);
    f.svg.polyline(pts, SERIES_COLORS[k], 1.4, s.name);
    for (const [px, py] of pts) {
      f.svg.rect(px - 2, py - 2, 4, 4, SERIES_COLORS[k]);
    }
  });
  return f.svg.render();
}

export type Kind = "paths" | "trajectories" | "scan" | "shift-scaling";

export function render(kind: Kind, tables: Table[], opts: PathsOptions = {}): string {
  switch (kind) {
    case "paths":
      return renderPaths(tables[0], opts);
    case "trajectories":
      return renderTrajectories(tables, opts.title ?? "trajectories");
    case "scan":
      return renderScan(tables, opts.title ?? "weak-value scan");
    case "shift-scaling":
      return renderShiftScaling(tables[0], opts.title ?? "pointer-shift scaling");
  }
}
