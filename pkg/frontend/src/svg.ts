// Minimal SVG assembly: every figure is a list of shape strings inside a
// fixed-size frame with margins for the axis labels.

export interface Frame {
    width: number;
    height: number;
    margin: { left: number; right: number; top: number; bottom: number };
}

export const DEFAULT_FRAME: Frame = {
    width: 720,
    height: 440,
    margin: { left: 64, right: 24, top: 28, bottom: 52 },
};

export interface Scale {
    (value: number): number;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
    const [d0, d1] = domain;
    const [r0, r1] = range;
    const span = d1 - d0 === 0 ? 1 : d1 - d0;
    return (value: number) => r0 + ((value - d0) / span) * (r1 - r0);
}

export function plotArea(frame: Frame) {
    return {
        x0: frame.margin.left,
        x1: frame.width - frame.margin.right,
        y0: frame.height - frame.margin.bottom,
        y1: frame.margin.top,
    };
}

function esc(text: string): string {
    return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function rect(x: number, y: number, w: number, h: number, fill: string): string {
    return `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`;
}

export function line(x1: number, y1: number, x2: number, y2: number, stroke = "#000", width = 1): string {
    return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"/>`;
}

export function polyline(xs: number[], ys: number[], stroke: string, width = 1.5, dash = ""): string {
    const points = xs.map((x, k) => `${fmt(x)},${fmt(ys[k])}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    return `<polyline points="${points}" fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr}/>`;
}

export function polygon(xs: number[], ys: number[], fill: string, opacity = 0.3): string {
    const points = xs.map((x, k) => `${fmt(x)},${fmt(ys[k])}`).join(" ");
    return `<polygon points="${points}" fill="${fill}" opacity="${opacity}"/>`;
}

export function text(x: number, y: number, content: string, options: { size?: number; anchor?: string; rotate?: number } = {}): string {
    const size = options.size ?? 13;
    const anchor = options.anchor ?? "start";
    const transform = options.rotate ? ` transform="rotate(${options.rotate} ${fmt(x)} ${fmt(y)})"` : "";
    return `<text x="${fmt(x)}" y="${fmt(y)}" font-family="sans-serif" font-size="${size}" text-anchor="${anchor}"${transform}>${esc(content)}</text>`;
}

/** Axis lines, a few ticks with numeric labels, and the axis titles. */
export function axes(frame: Frame, xDomain: [number, number], yDomain: [number, number], xLabel: string, yLabel: string): string[] {
    const area = plotArea(frame);
    const sx = linearScale(xDomain, [area.x0, area.x1]);
    const sy = linearScale(yDomain, [area.y0, area.y1]);
    const parts: string[] = [
        line(area.x0, area.y0, area.x1, area.y0),
        line(area.x0, area.y0, area.x0, area.y1),
        text((area.x0 + area.x1) / 2, frame.height - 12, xLabel, { anchor: "middle" }),
        text(18, (area.y0 + area.y1) / 2, yLabel, { anchor: "middle", rotate: -90 }),
    ];
    for (const t of ticks(xDomain, 6)) {
        const x = sx(t);
        parts.push(line(x, area.y0, x, area.y0 + 5));
        parts.push(text(x, area.y0 + 20, trim(t), { anchor: "middle", size: 11 }));
    }
    for (const t of ticks(yDomain, 5)) {
        const y = sy(t);
        parts.push(line(area.x0 - 5, y, area.x0, y));
        parts.push(text(area.x0 - 8, y + 4, trim(t), { anchor: "end", size: 11 }));
    }
    return parts;
}

export function ticks([lo, hi]: [number, number], count: number): number[] {
    if (hi === lo) {
        return [lo];
    }
    const rawStep = (hi - lo) / count;
    const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
    const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => (hi - lo) / s <= count) ?? rawStep;
    const start = Math.ceil(lo / step) * step;
    const out: number[] = [];
    for (let t = start; t <= hi + 1e-9 * step; t += step) {
        out.push(t);
    }
    return out;
}

function trim(value: number): string {
    const rounded = Math.round(value * 1e6) / 1e6;
    return String(rounded);
}

function fmt(value: number): string {
    return String(Math.round(value * 100) / 100);
}

export function document(frame: Frame, parts: string[]): string {
    return [
        `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}">`,
        rect(0, 0, frame.width, frame.height, "#ffffff"),
        ...parts,
        "</svg>",
    ].join("\n");
}
