/**
 * Minimal deterministic SVG chart primitives.
 *
 * No timestamps, no randomness, fixed number formatting (2 decimals for
 * coordinates) — identical inputs yield identical bytes.
 */

// Tol "bright" qualitative palette; stable series -> color mapping by index.
export const PALETTE = [
  "#4477aa",
  "#ee6677",
  "#228833",
  "#ccbb44",
  "#66ccee",
  "#aa3377",
  "#bbbbbb",
];

export const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

export function px(v: number): string {
  // fixed 2-decimal coordinates keep files byte-stable across platforms
  return v.toFixed(2);
}

export type Scale = (v: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  return (v: number) => (span === 0 ? (r0 + r1) / 2 : r0 + ((v - d0) / span) * (r1 - r0));
}

/** Round ticks covering [min, max] with about `count` steps. */
export function ticks(min: number, max: number, count: number): number[] {
  if (min === max) {
    return [min];
  }
  const raw = (max - min) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const start = Math.ceil(min / step) * step;
  const out: number[] = [];
  for (let v = start; v <= max + 1e-9 * step; v += step) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

export function tickLabel(v: number): string {
  const rounded = Number(v.toPrecision(10));
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export function plotArea(frame: Frame): { x0: number; x1: number; y0: number; y1: number } {
  return {
    x0: frame.left,
    x1: frame.width - frame.right,
    y0: frame.height - frame.bottom, // y grows downward in SVG
    y1: frame.top,
  };
}

export function svgDocument(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}

export function text(
  x: number,
  y: number,
  content: string,
  opts: { size?: number; anchor?: string; rotate?: number; bold?: boolean } = {},
): string {
  const size = opts.size ?? 12;
  const anchor = opts.anchor ?? "start";
  const transform = opts.rotate ? ` transform="rotate(${opts.rotate} ${px(x)} ${px(y)})"` : "";
  const weight = opts.bold ? " font-weight=\"bold\"" : "";
  return (
    `<text x="${px(x)}" y="${px(y)}" font-size="${size}" text-anchor="${anchor}"` +
    ` ${FONT}${weight}${transform}>${escapeXml(content)}</text>`
  );
}

export function line(x1: number, y1: number, x2: number, y2: number, stroke = "#333333", width = 1): string {
  return `<line x1="${px(x1)}" y1="${px(y1)}" x2="${px(x2)}" y2="${px(y2)}" stroke="${stroke}" stroke-width="${width}"/>`;
}

export function polyline(points: Array<[number, number]>, stroke: string, width = 1.5): string {
  const pts = points.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
  return `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`;
}

export function rect(
  x: number,
  y: number,
  w: number,
  h: number,
  fill: string,
  data: Record<string, string> = {},
): string {
  const extras = Object.entries(data)
    .map(([k, v]) => ` data-${k}="${escapeXml(v)}"`)
    .join("");
  return `<rect x="${px(x)}" y="${px(y)}" width="${px(w)}" height="${px(h)}" fill="${fill}"${extras}/>`;
}

export function xAxis(frame: Frame, scale: Scale, values: number[], label: string): string[] {
  const { x0, x1, y0 } = plotArea(frame);
  const parts = [line(x0, y0, x1, y0)];
  for (const v of values) {
    const x = scale(v);
    parts.push(line(x, y0, x, y0 + 4));
    parts.push(text(x, y0 + 16, tickLabel(v), { size: 10, anchor: "middle" }));
  }
  parts.push(text((x0 + x1) / 2, frame.height - 8, label, { size: 11, anchor: "middle" }));
  return parts;
}

export function yAxis(frame: Frame, scale: Scale, values: number[], label: string): string[] {
  const { x0, x1, y0, y1 } = plotArea(frame);
  const parts = [line(x0, y0, x0, y1)];
  for (const v of values) {
    const y = scale(v);
    parts.push(line(x0 - 4, y, x0, y));
    parts.push(line(x0, y, x1, y, "#dddddd", 0.5));
    parts.push(text(x0 - 7, y + 3, tickLabel(v), { size: 10, anchor: "end" }));
  }
  parts.push(text(14, (y0 + y1) / 2, label, { size: 11, anchor: "middle", rotate: -90 }));
  return parts;
}

export function legend(frame: Frame, names: string[], colors: string[]): string[] {
  const parts: string[] = [];
  let y = frame.top + 4;
  const x = frame.width - frame.right + 8;
  names.forEach((name, i) => {
    parts.push(rect(x, y, 10, 10, colors[i % colors.length]));
    parts.push(text(x + 14, y + 9, name, { size: 10 }));
    y += 16;
  });
  return parts;
}

function escapeXml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
