// Scene rasterizer: white RGBA canvas, Bresenham lines, filled circles,
// bitmap-font text. No antialiasing; figures at 2x glyph scale stay
// legible and every output byte is deterministic.

import { FONT, GLYPH_H, GLYPH_W, MISSING } from "./font.js";
import { Figure, Mark, RGB, glyphWidth, textWidth } from "./scene.js";

export class Canvas {
    readonly width: number;
    readonly height: number;
    readonly data: Uint8Array;

    constructor(width: number, height: number) {
        this.width = width;
        this.height = height;
        this.data = new Uint8Array(width * height * 4).fill(255);
    }

    set(x: number, y: number, [r, g, b]: RGB): void {
        if (x < 0 || y < 0 || x >= this.width || y >= this.height) {
            return;
        }
        const at = (y * this.width + x) * 4;
        this.data[at] = r;
        this.data[at + 1] = g;
        this.data[at + 2] = b;
        this.data[at + 3] = 255;
    }

    // square brush centered-ish on (x, y); width 1 paints a single pixel
    brush(x: number, y: number, color: RGB, width: number): void {
        const lo = -Math.floor((width - 1) / 2);
        const hi = Math.ceil((width - 1) / 2);
        for (let dy = lo; dy <= hi; dy++) {
            for (let dx = lo; dx <= hi; dx++) {
                this.set(x + dx, y + dy, color);
            }
        }
    }
}

function drawLine(c: Canvas, x1: number, y1: number, x2: number, y2: number,
    color: RGB, width: number, dashed: boolean): void {
    let x = Math.round(x1);
    let y = Math.round(y1);
    const xe = Math.round(x2);
    const ye = Math.round(y2);
    const dx = Math.abs(xe - x);
    const dy = -Math.abs(ye - y);
    const sx = x < xe ? 1 : -1;
    const sy = y < ye ? 1 : -1;
    let err = dx + dy;
    let step = 0;
    for (;;) {
        // 6 px on, 4 px off
        if (!dashed || step % 10 < 6) {
            c.brush(x, y, color, width);
        }
        if (x === xe && y === ye) {
            break;
        }
        const e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
        step++;
    }
}

function drawCircle(c: Canvas, cx: number, cy: number, r: number, color: RGB): void {
    const x0 = Math.round(cx);
    const y0 = Math.round(cy);
    for (let dy = -r; dy <= r; dy++) {
        for (let dx = -r; dx <= r; dx++) {
            if (dx * dx + dy * dy <= r * r + 0.5) {
                c.set(x0 + dx, y0 + dy, color);
            }
        }
    }
}

function drawText(c: Canvas, mark: Extract<Mark, { kind: "text" }>): void {
    const { text, size, color } = mark;
    const w = textWidth(text, size);
    let x = Math.round(mark.x);
    if (mark.anchor === "middle") {
        x -= Math.round(w / 2);
    } else if (mark.anchor === "end") {
        x -= w;
    }
    const top = Math.round(mark.y) - GLYPH_H * size; // baseline -> top
    for (const ch of text) {
        const rows = FONT[ch] ?? MISSING;
        for (let gy = 0; gy < GLYPH_H; gy++) {
            const bits = rows[gy] as number;
            for (let gx = 0; gx < GLYPH_W; gx++) {
                if ((bits >> (GLYPH_W - 1 - gx)) & 1) {
                    for (let py = 0; py < size; py++) {
                        for (let px = 0; px < size; px++) {
                            c.set(x + gx * size + px, top + gy * size + py, color);
                        }
                    }
                }
            }
        }
        x += glyphWidth(size);
    }
}

export function rasterize(figure: Figure): Canvas {
    const c = new Canvas(figure.width, figure.height);
    for (const mark of figure.marks) {
        switch (mark.kind) {
            case "line":
                drawLine(c, mark.x1, mark.y1, mark.x2, mark.y2,
                    mark.color, mark.width, mark.dashed ?? false);
                break;
            case "circle":
                drawCircle(c, mark.x, mark.y, mark.r, mark.color);
                break;
            case "text":
                drawText(c, mark);
                break;
        }
    }
    return c;
}
