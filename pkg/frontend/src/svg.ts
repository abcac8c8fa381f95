/**
 * Tiny SVG scene builder: linear/log scales, axes with ticks, polylines
 * and cells. Output is a plain string, so figures are pure functions of
 * their inputs and re-runs are byte-identical.
 */

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const inner = linearScale([Math.log10(domain[0]), Math.log10(domain[1])], range);
  const f = ((v: number) => inner(Math.log10(v))) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-12); Math.pow(10, e) <= hi * (1 + 1e-12); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

export function linearTicks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / chosen) * chosen; v <= hi + 1e-12 * span; v += chosen) {
    ticks.push(v);
  }
  return ticks;
}

const fmt = (v: number) => (Math.abs(v) >= 1e4 || (v !== 0 && Math.abs(v) < 1e-3) ? v.toExponential(1) : String(Math.round(v * 1e6) / 1e6));

export class Figure {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
    readonly margin = { left: 64, right: 16, top: 28, bottom: 44 },
  ) {}

  get plotLeft(): number {
    return this.margin.left;
  }
  get plotRight(): number {
    return this.width - this.margin.right;
  }
  get plotTop(): number {
    return this.margin.top;
  }
  get plotBottom(): number {
    return this.height - this.margin.bottom;
  }

  add(fragment: string): void {
    this.parts.push(fragment);
  }

  title(text: string): void {
    this.add(
      `<text x="${this.width / 2}" y="18" text-anchor="middle" font-size="14" font-family="sans-serif">${text}</text>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5, dash = ""): void {
    const pts = points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(`<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr}/>`);
  }

  circles(points: Array<[number, number]>, fill: string, r = 2.5): void {
    for (const [x, y] of points) {
      this.add(`<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}" fill="${fill}"/>`);
    }
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.add(
      `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${w.toFixed(2)}" height="${h.toFixed(2)}" fill="${fill}"/>`,
    );
  }

  text(x: number, y: number, content: string, anchor = "start", size = 11): void {
    this.add(
      `<text x="${x.toFixed(2)}" y="${y.toFixed(2)}" text-anchor="${anchor}" font-size="${size}" font-family="sans-serif">${content}</text>`,
    );
  }

  xAxis(scale: Scale, ticks: number[], label: string): void {
    const y = this.plotBottom;
    this.add(`<line x1="${this.plotLeft}" y1="${y}" x2="${this.plotRight}" y2="${y}" stroke="black"/>`);
    for (const t of ticks) {
      const x = scale(t);
      this.add(`<line x1="${x.toFixed(2)}" y1="${y}" x2="${x.toFixed(2)}" y2="${y + 5}" stroke="black"/>`);
      this.text(x, y + 18, fmt(t), "middle", 10);
    }
    this.text((this.plotLeft + this.plotRight) / 2, this.height - 8, label, "middle");
  }

  yAxis(scale: Scale, ticks: number[], label: string): void {
    const x = this.plotLeft;
    this.add(`<line x1="${x}" y1="${this.plotTop}" x2="${x}" y2="${this.plotBottom}" stroke="black"/>`);
    for (const t of ticks) {
      const y = scale(t);
      this.add(`<line x1="${x - 5}" y1="${y.toFixed(2)}" x2="${x}" y2="${y.toFixed(2)}" stroke="black"/>`);
      this.text(x - 8, y + 3.5, fmt(t), "end", 10);
    }
    this.add(
      `<text x="14" y="${(this.plotTop + this.plotBottom) / 2}" text-anchor="middle" font-size="11" font-family="sans-serif" transform="rotate(-90 14 ${(this.plotTop + this.plotBottom) / 2})">${label}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

const VIRIDIS: Array<[number, number, number]> = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

export function viridis(s: number): string {
  const t = Math.min(1, Math.max(0, s)) * (VIRIDIS.length - 1);
  const i = Math.min(VIRIDIS.length - 2, Math.floor(t));
  const f = t - i;
  const mix = (a: number, b: number) => Math.round(a + (b - a) * f);
  const [r, g, b] = [0, 1, 2].map((c) => mix(VIRIDIS[i][c], VIRIDIS[i + 1][c]));
  return `rgb(${r},${g},${b})`;
}
