// Figure builders for the two commands. Everything lands in a Figure of
// primitive marks; svg.ts and raster.ts turn that into bytes.

import { DataError, ResultsTable } from "./csv.js";
import { MedianPoint, fitSlope, groupMedians } from "./fit.js";
import {
    BLACK,
    Figure,
    GRAY,
    LogScale,
    Mark,
    PALETTE,
    RGB,
    fmtTick,
    logScale,
    logTicks,
    textWidth,
} from "./scene.js";

const WIDTH = 640;
const HEIGHT = 440;
const MARGIN = { left: 74, right: 22, top: 30, bottom: 52 };

interface Axes {
    x: LogScale;
    y: LogScale;
    marks: Mark[];
}

function makeAxes(xlo: number, xhi: number, ylo: number, yhi: number,
    xTickValues: number[], xlabel: string, ylabel: string): Axes {
    const x = logScale(xlo, xhi, MARGIN.left, WIDTH - MARGIN.right);
    const y = logScale(ylo, yhi, HEIGHT - MARGIN.bottom, MARGIN.top);
    const marks: Mark[] = [];
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;

    for (const v of logTicks(ylo, yhi)) {
        const py = y.map(v);
        marks.push({ kind: "line", x1: x0, y1: py, x2: x1, y2: py, color: [225, 225, 225], width: 1 });
        marks.push({ kind: "line", x1: x0 - 4, y1: py, x2: x0, y2: py, color: BLACK, width: 1 });
        marks.push({
            kind: "text", x: x0 - 8, y: py + 4, text: fmtTick(v),
            color: BLACK, size: 1, anchor: "end",
        });
    }
    for (const v of xTickValues) {
        const px = x.map(v);
        marks.push({ kind: "line", x1: px, y1: y0, x2: px, y2: y0 + 4, color: BLACK, width: 1 });
        marks.push({
            kind: "text", x: px, y: y0 + 18, text: fmtTick(v),
            color: BLACK, size: 1, anchor: "middle",
        });
    }
    // frame on top of gridlines
    marks.push({ kind: "line", x1: x0, y1: y0, x2: x1, y2: y0, color: BLACK, width: 1 });
    marks.push({ kind: "line", x1: x0, y1: y1, x2: x1, y2: y1, color: BLACK, width: 1 });
    marks.push({ kind: "line", x1: x0, y1: y0, x2: x0, y2: y1, color: BLACK, width: 1 });
    marks.push({ kind: "line", x1: x1, y1: y0, x2: x1, y2: y1, color: BLACK, width: 1 });
    marks.push({
        kind: "text", x: (x0 + x1) / 2, y: HEIGHT - 14, text: xlabel,
        color: BLACK, size: 2, anchor: "middle",
    });
    marks.push({
        kind: "text", x: 8, y: 18, text: ylabel, color: BLACK, size: 2, anchor: "start",
    });
    return { x, y, marks };
}

function positive(points: MedianPoint[]): MedianPoint[] {
    return points.filter((p) => p.median > 0);
}

function domain(values: number[], padLo: number, padHi: number): [number, number] {
    const lo = Math.min(...values) * padLo;
    const hi = Math.max(...values) * padHi;
    return [lo, hi];
}

export interface RateFigure {
    figure: Figure;
    medians: MedianPoint[];
    slope: number | null;
    annotation: string | null;
}

export function buildRateFigure(table: ResultsTable, loss: string): RateFigure {
    if (!table.lossColumns.includes(loss)) {
        throw new DataError(`loss column ${loss} not in CSV `
            + `(has: ${table.lossColumns.join(", ")})`);
    }
    const medians = groupMedians(table.rows, loss);
    const drawable = positive(medians);
    if (drawable.length === 0) {
        throw new DataError(`no positive ${loss} medians to plot`);
    }
    const fit = fitSlope(drawable);
    if (loss === "l_max" && fit && table.summarySlope !== null
        && Math.abs(fit.slope - table.summarySlope) > 1e-3) {
        throw new DataError(
            `refit slope ${fit.slope.toFixed(6)} disagrees with the CSV summary `
            + `${table.summarySlope.toFixed(6)}; the file is inconsistent`);
    }

    const [xlo, xhi] = domain(drawable.map((p) => p.n), 0.82, 1.22);
    const first = drawable[0] as MedianPoint;
    const last = drawable[drawable.length - 1] as MedianPoint;
    const ys = drawable.map((p) => p.median);
    if (fit) {
        ys.push(Math.exp(fit.intercept + fit.slope * Math.log(xhi)));
    }
    ys.push(first.median * Math.sqrt(first.n / xhi)); // reference line end
    const [ylo, yhi] = domain(ys, 0.72, 1.35);

    const axes = makeAxes(xlo, xhi, ylo, yhi, drawable.map((p) => p.n),
        "n", `median ${loss}`);
    const marks = [...axes.marks];

    // reference slope -1/2 through the first point, dashed
    const refY = (v: number) => first.median * Math.sqrt(first.n / v);
    marks.push({
        kind: "line",
        x1: axes.x.map(xlo), y1: axes.y.map(refY(xlo)),
        x2: axes.x.map(xhi), y2: axes.y.map(refY(xhi)),
        color: GRAY, width: 1, dashed: true,
    });
    marks.push({
        kind: "text",
        x: axes.x.map(last.n), y: axes.y.map(refY(last.n)) - 8,
        text: "reference -1/2", color: GRAY, size: 1, anchor: "middle",
    });

    let annotation: string | null = null;
    if (fit) {
        const lineY = (v: number) => Math.exp(fit.intercept + fit.slope * Math.log(v));
        marks.push({
            kind: "line",
            x1: axes.x.map(xlo), y1: axes.y.map(lineY(xlo)),
            x2: axes.x.map(xhi), y2: axes.y.map(lineY(xhi)),
            color: PALETTE[0] as RGB, width: 2,
        });
        annotation = `slope = ${fit.slope.toFixed(3)}`;
        marks.push({
            kind: "text", x: WIDTH - MARGIN.right - 6, y: MARGIN.top + 22,
            text: annotation, color: PALETTE[0] as RGB, size: 2, anchor: "end",
        });
    }
    for (const p of drawable) {
        marks.push({
            kind: "circle", x: axes.x.map(p.n), y: axes.y.map(p.median),
            r: 4, color: BLACK,
        });
    }
    return {
        figure: { width: WIDTH, height: HEIGHT, marks },
        medians,
        slope: fit ? fit.slope : null,
        annotation,
    };
}

export interface LossesFigure {
    figure: Figure;
    curves: { loss: string; points: MedianPoint[] }[];
}

export function buildLossesFigure(table: ResultsTable, losses: string[]): LossesFigure {
    if (losses.length === 0) {
        throw new DataError("no losses selected");
    }
    for (const loss of losses) {
        if (!table.lossColumns.includes(loss)) {
            throw new DataError(`loss column ${loss} not in CSV `
                + `(has: ${table.lossColumns.join(", ")})`);
        }
    }
    const curves = losses.map((loss) => ({
        loss,
        points: positive(groupMedians(table.rows, loss)),
    }));
    const drawable = curves.filter((c) => c.points.length > 0);
    if (drawable.length === 0) {
        throw new DataError("no positive medians to plot");
    }
    const allPoints = drawable.flatMap((c) => c.points);
    const [xlo, xhi] = domain(allPoints.map((p) => p.n), 0.82, 1.22);
    const [ylo, yhi] = domain(allPoints.map((p) => p.median), 0.72, 1.35);
    const nTicks = [...new Set(allPoints.map((p) => p.n))].sort((a, b) => a - b);
    const axes = makeAxes(xlo, xhi, ylo, yhi, nTicks, "n", "median loss");
    const marks = [...axes.marks];

    drawable.forEach((curve, ci) => {
        const color = PALETTE[ci % PALETTE.length] as RGB;
        const pts = curve.points;
        for (let i = 0; i + 1 < pts.length; i++) {
            const a = pts[i] as MedianPoint;
            const b = pts[i + 1] as MedianPoint;
            marks.push({
                kind: "line",
                x1: axes.x.map(a.n), y1: axes.y.map(a.median),
                x2: axes.x.map(b.n), y2: axes.y.map(b.median),
                color, width: 2,
            });
        }
        for (const p of pts) {
            marks.push({
                kind: "circle", x: axes.x.map(p.n), y: axes.y.map(p.median),
                r: 3, color,
            });
        }
    });

    // legend, top right inside the frame
    const legendWidth = Math.max(...drawable.map((c) => textWidth(c.loss, 1))) + 30;
    const lx = WIDTH - MARGIN.right - legendWidth - 6;
    drawable.forEach((curve, ci) => {
        const color = PALETTE[ci % PALETTE.length] as RGB;
        const ly = MARGIN.top + 14 + ci * 16;
        marks.push({ kind: "line", x1: lx, y1: ly - 3, x2: lx + 20, y2: ly - 3, color, width: 2 });
        marks.push({
            kind: "text", x: lx + 26, y: ly, text: curve.loss,
            color: BLACK, size: 1, anchor: "start",
        });
    });
    return { figure: { width: WIDTH, height: HEIGHT, marks }, curves };
}
