import { Figure, Mark, RGB } from "./scene.js";

function rgb([r, g, b]: RGB): string {
    return `rgb(${r},${g},${b})`;
}

function esc(s: string): string {
    return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmt(v: number): string {
    return Number.isInteger(v) ? String(v) : v.toFixed(2);
}

function markup(mark: Mark): string {
    switch (mark.kind) {
        case "line": {
            const dash = mark.dashed ? ' stroke-dasharray="6 4"' : "";
            return `<line x1="${fmt(mark.x1)}" y1="${fmt(mark.y1)}" x2="${fmt(mark.x2)}" y2="${fmt(mark.y2)}" stroke="${rgb(mark.color)}" stroke-width="${mark.width}"${dash}/>`;
        }
        case "circle":
            return `<circle cx="${fmt(mark.x)}" cy="${fmt(mark.y)}" r="${mark.r}" fill="${rgb(mark.color)}"/>`;
        case "text": {
            const anchor = mark.anchor === "start" ? "" : ` text-anchor="${mark.anchor}"`;
            // font-size chosen so SVG text occupies roughly the raster
            // footprint (7*size px tall glyphs)
            return `<text x="${fmt(mark.x)}" y="${fmt(mark.y)}" font-family="monospace" font-size="${9 * mark.size}"${anchor} fill="${rgb(mark.color)}">${esc(mark.text)}</text>`;
        }
    }
}

export function renderSVG(figure: Figure): string {
    const body = figure.marks.map(markup).join("\n  ");
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${figure.width}" height="${figure.height}" viewBox="0 0 ${figure.width} ${figure.height}">
  <rect width="${figure.width}" height="${figure.height}" fill="white"/>
  ${body}
</svg>
`;
}
