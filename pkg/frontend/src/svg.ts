/** Minimal deterministic SVG scene builder: fixed styles, no timestamps. */

export interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Linear map from a data interval onto a pixel interval. */
export class Scale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly p0: number,
    readonly p1: number,
  ) {
    if (d0 === d1) {
      throw new Error("degenerate scale domain");
    }
  }

  at(v: number): number {
    return this.p0 + ((v - this.d0) / (this.d1 - this.d0)) * (this.p1 - this.p0);
  }
}

/** Round-trip-stable coordinate formatting (2 decimals is below 1px). */
export function px(v: number): string {
  return v.toFixed(2);
}

/** "Nice" tick positions covering [lo, hi]. */
export function ticks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo;
  const rawStep = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const norm = rawStep / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-9 * span; v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return String(Math.round(v * 1e6) / 1e6);
}

export class Svg {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
        `height="${height}" viewBox="0 0 ${width} ${height}" ` +
        `font-family="Helvetica, Arial, sans-serif">`,
      `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string,
       strokeWidth = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${px(x1)}" y1="${px(y1)}" x2="${px(x2)}" y2="${px(y2)}" ` +
        `stroke="${stroke}" stroke-width="${strokeWidth}"${d}/>`,
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string,
           strokeWidth = 1.5): void {
    const body = pts.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${body}" fill="none" stroke="${stroke}" ` +
        `stroke-width="${strokeWidth}"/>`,
    );
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(
      `<circle cx="${px(x)}" cy="${px(y)}" r="${r}" fill="${fill}"/>`,
    );
  }

  rect(b: Box, fill: string, opacity = 1): void {
    const o = opacity === 1 ? "" : ` fill-opacity="${opacity}"`;
    this.parts.push(
      `<rect x="${px(b.x)}" y="${px(b.y)}" width="${px(b.width)}" ` +
        `height="${px(b.height)}" fill="${fill}"${o}/>`,
    );
  }

  text(x: number, y: number, content: string, size = 11,
       anchor: "start" | "middle" | "end" = "start", fill = "#222"): void {
    this.parts.push(
      `<text x="${px(x)}" y="${px(y)}" font-size="${size}" ` +
        `text-anchor="${anchor}" fill="${fill}">${escapeXml(content)}</text>`,
    );
  }

  axes(plot: Box, xScale: Scale, yScale: Scale, xLabel: string,
       yLabel: string): void {
    const bottom = plot.y + plot.height;
    this.line(plot.x, bottom, plot.x + plot.width, bottom, "#222");
    this.line(plot.x, plot.y, plot.x, bottom, "#222");
    for (const t of ticks(Math.min(xScale.d0, xScale.d1),
                          Math.max(xScale.d0, xScale.d1))) {
      const xp = xScale.at(t);
      this.line(xp, bottom, xp, bottom + 4, "#222");
      this.text(xp, bottom + 16, tickLabel(t), 10, "middle");
    }
    for (const t of ticks(Math.min(yScale.d0, yScale.d1),
                          Math.max(yScale.d0, yScale.d1))) {
      const yp = yScale.at(t);
      this.line(plot.x - 4, yp, plot.x, yp, "#222");
      this.text(plot.x - 7, yp + 3.5, tickLabel(t), 10, "end");
    }
    this.text(plot.x + plot.width / 2, bottom + 32, xLabel, 12, "middle");
    this.parts.push(
      `<text x="${px(14)}" y="${px(plot.y + plot.height / 2)}" ` +
        `font-size="12" text-anchor="middle" fill="#222" ` +
        `transform="rotate(-90 14 ${px(plot.y + plot.height / 2)})">` +
        `${escapeXml(yLabel)}</text>`,
    );
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}
