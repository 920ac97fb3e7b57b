import * as fs from "node:fs";

import { DataError } from "./csv.js";
import { encodePNG } from "./png.js";
import { rasterize } from "./raster.js";
import { Figure } from "./scene.js";
import { renderSVG } from "./svg.js";

// Render fully in memory, then one write: a failing render never leaves
// a partial file behind.
export function writeFigure(path: string, figure: Figure): void {
    let bytes: Buffer;
    if (path.endsWith(".svg")) {
        bytes = Buffer.from(renderSVG(figure), "utf8");
    } else if (path.endsWith(".png")) {
        const canvas = rasterize(figure);
        bytes = encodePNG(canvas.width, canvas.height, canvas.data);
    } else {
        throw new DataError(`unsupported output extension (use .svg or .png): ${path}`);
    }
    fs.writeFileSync(path, bytes);
}
