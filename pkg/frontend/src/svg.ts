/** Deterministic SVG assembly: fixed-precision numbers, no runtime state. */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`cannot place non-finite coordinate ${x}`);
  const rounded = Math.round(x * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  return scale;
}

/** Round tick values at 1/2/5 steps covering [lo, hi]. */
export function ticks(lo: number, hi: number, count = 5): number[] {
  if (lo === hi) return [lo];
  const rawStep = (hi - lo) / Math.max(count, 1);
  const power = Math.floor(Math.log10(rawStep));
  const base = Math.pow(10, power);
  let step = base;
  for (const mult of [1, 2, 5, 10]) {
    step = mult * base;
    if (step >= rawStep) break;
  }
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    out.push(Math.round(v / step) * step);
  }
  return out;
}

export function tickLabel(v: number): string {
  const rounded = Math.round(v * 1e9) / 1e9;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export class Svg {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${fmt(width)}" height="${fmt(height)}" ` +
        `viewBox="0 0 ${fmt(width)} ${fmt(height)}" font-family="Helvetica, Arial, sans-serif">`,
    );
    this.parts.push(`<rect width="${fmt(width)}" height="${fmt(height)}" fill="white"/>`);
  }

  comment(text: string): void {
    this.parts.push(`<!-- ${text} -->`);
  }

  line(x1: number, y1: number, x2: number, y2: number, style: string): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ${style}/>`,
    );
  }

  polyline(points: Array<[number, number]>, style: string): void {
    const coords = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polyline points="${coords}" fill="none" ${style}/>`);
  }

  rect(x: number, y: number, w: number, h: number, style: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(Math.max(w, 0))}" ` +
        `height="${fmt(Math.max(h, 0))}" ${style}/>`,
    );
  }

  circle(cx: number, cy: number, r: number, style: string): void {
    this.parts.push(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" ${style}/>`);
  }

  text(x: number, y: number, content: string, style = ""): void {
    const escaped = content
      .replace(/&/g, "&amp;")
      .replace(/</g, "&lt;")
      .replace(/>/g, "&gt;");
    this.parts.push(`<text x="${fmt(x)}" y="${fmt(y)}" ${style}>${escaped}</text>`);
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export interface Frame {
  x: Scale;
  y: Scale;
  left: number;
  top: number;
  right: number;
  bottom: number;
}

/** Axis box with ticks and labels inside the given panel rectangle. */
export function frame(
  svg: Svg,
  panel: { left: number; top: number; width: number; height: number },
  xDomain: [number, number],
  yDomain: [number, number],
  options: { xLabel?: string; yLabel?: string; title?: string } = {},
): Frame {
  const left = panel.left + 46;
  const top = panel.top + (options.title ? 22 : 10);
  const right = panel.left + panel.width - 12;
  const bottom = panel.top + panel.height - 30;
  const x = linearScale(xDomain, [left, right]);
  const y = linearScale(yDomain, [bottom, top]);
  const axisStyle = 'stroke="#444" stroke-width="1"';
  svg.line(left, bottom, right, bottom, axisStyle);
  svg.line(left, top, left, bottom, axisStyle);
  for (const t of ticks(xDomain[0], xDomain[1])) {
    svg.line(x(t), bottom, x(t), bottom + 4, axisStyle);
    svg.text(x(t), bottom + 16, tickLabel(t), 'font-size="10" text-anchor="middle" fill="#333"');
  }
  for (const t of ticks(yDomain[0], yDomain[1])) {
    svg.line(left - 4, y(t), left, y(t), axisStyle);
    svg.text(left - 7, y(t) + 3, tickLabel(t), 'font-size="10" text-anchor="end" fill="#333"');
  }
  if (options.title) {
    svg.text(
      (left + right) / 2,
      panel.top + 14,
      options.title,
      'font-size="12" text-anchor="middle" fill="#111"',
    );
  }
  if (options.xLabel) {
    svg.text(
      (left + right) / 2,
      bottom + 27,
      options.xLabel,
      'font-size="11" text-anchor="middle" fill="#333"',
    );
  }
  return { x, y, left, top, right, bottom };
}

/** Diverging blue-white-red map on [-limit, limit]. */
export function divergingColor(value: number, limit: number): string {
  const t = Math.max(-1, Math.min(1, value / limit));
  const channel = (a: number, b: number, u: number) => Math.round(a + (b - a) * u);
  let r: number, g: number, b: number;
  if (t < 0) {
    r = channel(33, 247, 1 + t);
    g = channel(102, 247, 1 + t);
    b = channel(172, 247, 1 + t);
  } else {
    r = channel(247, 178, t);
    g = channel(247, 24, t);
    b = channel(247, 43, t);
  }
  return `rgb(${r},${g},${b})`;
}

/** Sequential white-to-dark-violet map on [0, limit]. */
export function sequentialColor(value: number, limit: number): string {
  const t = limit <= 0 ? 0 : Math.max(0, Math.min(1, value / limit));
  const channel = (a: number, b: number) => Math.round(a + (b - a) * t);
  return `rgb(${channel(252, 84)},${channel(251, 39)},${channel(253, 143)})`;
}
