import { Table, column, columnIndex } from "./csv";
import {
    DEFAULT_FRAME,
    Frame,
    axes,
    document,
    line,
    linearScale,
    plotArea,
    polygon,
    polyline,
    rect,
    text,
} from "./svg";

export type FigureKind = "heatmap" | "signal" | "overlaps";

// dark blue -> teal -> green -> yellow ramp for occupation probabilities
const RAMP: [number, number, number][] = [
    [68, 1, 84],
    [59, 82, 139],
    [33, 145, 140],
    [94, 201, 98],
    [253, 231, 37],
];

export function rampColor(t: number): string {
    const clamped = Math.max(0, Math.min(1, t));
    const pos = clamped * (RAMP.length - 1);
    const k = Math.min(Math.floor(pos), RAMP.length - 2);
    const frac = pos - k;
    const mix = RAMP[k].map((a, i) => Math.round(a + frac * (RAMP[k + 1][i] - a)));
    return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}

function dotColumns(table: Table): string[] {
    const dots = table.columns.filter((c) => /^dot_\d+$/.test(c));
    if (dots.length === 0) {
        throw new Error(`missing column 'dot_1' (have: ${table.columns.join(", ")})`);
    }
    return dots.sort((a, b) => Number(a.slice(4)) - Number(b.slice(4)));
}

/** Occupation heatmap: tau along x, dot index along y, color = probability. */
export function renderHeatmap(table: Table, frame: Frame = DEFAULT_FRAME): string {
    const tau = column(table, "tau");
    const dots = dotColumns(table);
    const occ = dots.map((name) => column(table, name));
    const n = dots.length;
    const area = plotArea(frame);

    const tMax = tau.length ? tau[tau.length - 1] : 1;
    const sx = linearScale([0, tMax], [area.x0, area.x1]);
    const sy = linearScale([0.5, n + 0.5], [area.y0, area.y1]);
    let pMax = 0;
    for (const row of occ) {
        for (const p of row) {
            pMax = Math.max(pMax, p);
        }
    }
    if (pMax === 0) {
        pMax = 1;
    }

    const cells: string[] = [];
    for (let k = 0; k < tau.length; k++) {
        const x0 = k === 0 ? sx(tau[0]) : sx((tau[k - 1] + tau[k]) / 2);
        const x1 = k === tau.length - 1 ? sx(tau[k]) : sx((tau[k] + tau[k + 1]) / 2);
        for (let j = 0; j < n; j++) {
            const y0 = sy(j + 0.5);
            const y1 = sy(j + 1.5);
            cells.push(rect(x0, y1, x1 - x0 + 0.5, y0 - y1, rampColor(occ[j][k] / pMax)));
        }
    }
    const parts = [
        ...cells,
        ...axes(frame, [0, tMax], [0.5, n + 0.5], "tau", "dot index"),
        text(area.x1, area.y1 - 8, `p_max = ${pMax.toFixed(3)}`, { anchor: "end", size: 11 }),
    ];
    return document(frame, parts);
}

/** Detector click rate vs time with a +-1 standard error band. */
export function renderSignal(table: Table, frame: Frame = DEFAULT_FRAME): string {
    const tau = column(table, "tau_mid");
    const signal = column(table, "signal");
    const stderr = column(table, "stderr");
    const area = plotArea(frame);

    const tMax = tau.length ? tau[tau.length - 1] : 1;
    const top = tau.length ? Math.max(...signal.map((s, k) => s + stderr[k])) * 1.05 : 1;
    const sx = linearScale([0, tMax], [area.x0, area.x1]);
    const sy = linearScale([0, top || 1], [area.y0, area.y1]);

    const parts = [...axes(frame, [0, tMax], [0, top || 1], "tau", "detector signal")];
    if (tau.length > 0) {
        const bandX = [...tau, ...[...tau].reverse()].map(sx);
        const bandY = [
            ...signal.map((s, k) => s + stderr[k]),
            ...[...signal].reverse().map((s, k) => s - [...stderr].reverse()[k]),
        ].map(sy);
        parts.push(polygon(bandX, bandY, "#4477aa"));
        parts.push(polyline(tau.map(sx), signal.map(sy), "#4477aa", 1.8));
    }
    return document(frame, parts);
}

const OVERLAP_STYLE: { name: string; color: string; dash: string }[] = [
    { name: "phi0", color: "#555555", dash: "" },
    { name: "phi1", color: "#555555", dash: "6,4" },
    { name: "phi2", color: "#cc3311", dash: "6,4" },
    { name: "phi3", color: "#cc3311", dash: "" },
];

/** The four protocol overlap traces, with the final phi3 value called out. */
export function renderOverlaps(table: Table, frame: Frame = DEFAULT_FRAME): string {
    const tau = column(table, "tau");
    for (const { name } of OVERLAP_STYLE) {
        columnIndex(table, name);
    }
    const area = plotArea(frame);
    const tMax = tau.length ? tau[tau.length - 1] : 1;
    const sx = linearScale([0, tMax], [area.x0, area.x1]);
    const sy = linearScale([0, 1.05], [area.y0, area.y1]);

    const parts = [...axes(frame, [0, tMax], [0, 1.05], "tau", "overlap probability")];
    OVERLAP_STYLE.forEach(({ name, color, dash }, k) => {
        const values = column(table, name);
        if (values.length > 0) {
            parts.push(polyline(tau.map(sx), values.map(sy), color, 1.8, dash));
        }
        const lx = area.x0 + 14 + k * 84;
        parts.push(line(lx, area.y1 + 10, lx + 26, area.y1 + 10, color, 2));
        parts.push(text(lx + 32, area.y1 + 14, name, { size: 12 }));
    });
    if (tau.length > 0) {
        const final = column(table, "phi3")[tau.length - 1];
        parts.push(text(area.x1, sy(final) - 8, `phi3(end) = ${final.toFixed(4)}`, {
            anchor: "end",
            size: 12,
        }));
    }
    return document(frame, parts);
}

export function render(kind: FigureKind, table: Table, frame: Frame = DEFAULT_FRAME): string {
    switch (kind) {
        case "heatmap":
            return renderHeatmap(table, frame);
        case "signal":
            return renderSignal(table, frame);
        case "overlaps":
            return renderOverlaps(table, frame);
        default:
            throw new Error(`unknown figure kind '${kind}'`);
    }
}
