// Median aggregation and the log-log slope fit. The harness is the
// source of numerical truth for the headline slope; the fit here exists
// as a cross-check and for loss columns the harness does not summarize.

import { DataError, ResultRow } from "./csv.js";

export interface MedianPoint {
    n: number;
    median: number;
}

export function median(values: number[]): number {
    if (values.length === 0) {
        throw new DataError("median of empty list");
    }
    const sorted = [...values].sort((a, b) => a - b);
    const mid = Math.floor(sorted.length / 2);
    return sorted.length % 2 === 1
        ? (sorted[mid] as number)
        : ((sorted[mid - 1] as number) + (sorted[mid] as number)) / 2;
}

// Per-n medians of one loss column, ascending n. Unavailable cells are
// skipped; an n whose cells are all unavailable is dropped entirely.
export function groupMedians(rows: ResultRow[], loss: string): MedianPoint[] {
    const byN = new Map<number, number[]>();
    for (const row of rows) {
        if (!(loss in row.losses)) {
            throw new DataError(`loss column ${loss} missing`);
        }
        const v = row.losses[loss];
        if (v === null || v === undefined) {
            continue;
        }
        const bucket = byN.get(row.n);
        if (bucket) {
            bucket.push(v);
        } else {
            byN.set(row.n, [v]);
        }
    }
    return [...byN.entries()]
        .sort((a, b) => a[0] - b[0])
        .map(([n, vals]) => ({ n, median: median(vals) }));
}

export interface LogFit {
    slope: number;
    intercept: number; // in ln space: ln(median) = intercept + slope * ln(n)
}

export function fitSlope(points: MedianPoint[]): LogFit | null {
    if (points.length < 2 || points.some((p) => p.median <= 0)) {
        return null;
    }
    const xs = points.map((p) => Math.log(p.n));
    const ys = points.map((p) => Math.log(p.median));
    const xbar = xs.reduce((a, b) => a + b, 0) / xs.length;
    const ybar = ys.reduce((a, b) => a + b, 0) / ys.length;
    let sxy = 0;
    let sxx = 0;
    for (let i = 0; i < xs.length; i++) {
        sxy += ((xs[i] as number) - xbar) * ((ys[i] as number) - ybar);
        sxx += ((xs[i] as number) - xbar) ** 2;
    }
    if (sxx === 0) {
        return null;
    }
    const slope = sxy / sxx;
    return { slope, intercept: ybar - slope * xbar };
}
