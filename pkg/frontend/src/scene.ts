// Figures are flat lists of primitive marks in pixel coordinates, built
// once and then serialized by either backend (SVG markup or rasterized
// PNG). Keeping the scene this dumb is what keeps the two outputs in
// agreement.

export type RGB = [number, number, number];

export interface LineMark {
    kind: "line";
    x1: number; y1: number; x2: number; y2: number;
    color: RGB;
    width: number;
    dashed?: boolean;
}

export interface CircleMark {
    kind: "circle";
    x: number; y: number; r: number;
    color: RGB;
}

export interface TextMark {
    kind: "text";
    x: number; y: number; // y is the text baseline
    text: string;
    color: RGB;
    size: number; // glyph scale: height is 7*size px
    anchor: "start" | "middle" | "end";
}

export type Mark = LineMark | CircleMark | TextMark;

export interface Figure {
    width: number;
    height: number;
    marks: Mark[];
}

export const BLACK: RGB = [20, 20, 20];
export const GRAY: RGB = [150, 150, 150];
export const PALETTE: RGB[] = [
    [31, 119, 180],
    [214, 39, 40],
    [44, 160, 44],
    [148, 103, 189],
    [255, 127, 14],
    [140, 86, 75],
];

// Map a positive-value interval onto pixels through log10.
export interface LogScale {
    lo: number;
    hi: number;
    r0: number;
    r1: number;
    map(v: number): number;
}

export function logScale(lo: number, hi: number, r0: number, r1: number): LogScale {
    if (!(lo > 0) || !(hi > lo)) {
        throw new Error(`log scale needs 0 < lo < hi, got [${lo}, ${hi}]`);
    }
    const llo = Math.log10(lo);
    const lhi = Math.log10(hi);
    return {
        lo, hi, r0, r1,
        map: (v: number) => r0 + ((Math.log10(v) - llo) / (lhi - llo)) * (r1 - r0),
    };
}

// 1-2-5 ticks per decade inside [lo, hi].
export function logTicks(lo: number, hi: number): number[] {
    const out: number[] = [];
    const start = Math.floor(Math.log10(lo));
    const stop = Math.ceil(Math.log10(hi));
    for (let e = start; e <= stop; e++) {
        for (const m of [1, 2, 5]) {
            const v = m * 10 ** e;
            if (v >= lo * 0.999 && v <= hi * 1.001) {
                out.push(v);
            }
        }
    }
    return out;
}

export function fmtTick(v: number): string {
    if (v >= 1) {
        return Number.isInteger(v) ? String(v) : v.toPrecision(3);
    }
    // trim trailing zeros of the fixed form
    return v.toFixed(Math.max(0, -Math.floor(Math.log10(v)) + 1))
        .replace(/0+$/, "").replace(/\.$/, "");
}

export function glyphWidth(size: number): number {
    return 6 * size; // 5 columns + 1 space
}

export function textWidth(text: string, size: number): number {
    return text.length * glyphWidth(size);
}
