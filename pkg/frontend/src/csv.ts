// Reader for the experiment harness results CSV. The contract: a fixed
// column head (n,trial,seed,sigma,model,delta1..delta4), then one column
// per loss, then undecided_pairs,runtime_ms; after the data rows come
// summary comment lines "# median,<n>,<median>,<corrected>" and
// "# slope,<value|not-applicable>". Empty loss cells mean the loss was
// unavailable for that trial.

import * as fs from "node:fs";

export class DataError extends Error {}

export interface ResultRow {
    n: number;
    trial: number;
    losses: Record<string, number | null>;
}

export interface ResultsTable {
    lossColumns: string[];
    rows: ResultRow[];
    summaryMedians: { n: number; median: number; corrected: number }[];
    summarySlope: number | null;
}

const HEAD = ["n", "trial", "seed", "sigma", "model",
    "delta1", "delta2", "delta3", "delta4"];
const TAIL = ["undecided_pairs", "runtime_ms"];

export function parseResults(text: string): ResultsTable {
    const lines = text.split("\n").filter((l) => l.length > 0);
    if (lines.length === 0) {
        throw new DataError("empty file");
    }
    const header = (lines[0] as string).split(",");
    for (let i = 0; i < HEAD.length; i++) {
        if (header[i] !== HEAD[i]) {
            throw new DataError(`malformed header: expected column ${i} to be ${HEAD[i]}`);
        }
    }
    const tailAt = header.indexOf(TAIL[0] as string);
    if (tailAt <= HEAD.length || header.slice(tailAt).join(",") !== TAIL.join(",")) {
        throw new DataError("malformed header: missing loss or tail columns");
    }
    const lossColumns = header.slice(HEAD.length, tailAt);

    const rows: ResultRow[] = [];
    const summaryMedians: ResultsTable["summaryMedians"] = [];
    let summarySlope: number | null = null;
    let sawSlopeLine = false;

    for (const line of lines.slice(1)) {
        if (line.startsWith("#")) {
            const parts = line.split(",");
            if (parts[0] === "# median") {
                if (parts.length !== 4) {
                    throw new DataError(`malformed summary line: ${line}`);
                }
                summaryMedians.push({
                    n: toNumber(parts[1] as string, line),
                    median: toNumber(parts[2] as string, line),
                    corrected: toNumber(parts[3] as string, line),
                });
            } else if (parts[0] === "# slope") {
                sawSlopeLine = true;
                if (parts[1] !== "not-applicable") {
                    summarySlope = toNumber(parts[1] as string, line);
                }
            } else {
                throw new DataError(`unknown summary line: ${line}`);
            }
            continue;
        }
        const cells = line.split(",");
        if (cells.length !== header.length) {
            throw new DataError(
                `row has ${cells.length} cells, header has ${header.length}: ${line}`);
        }
        const losses: Record<string, number | null> = {};
        for (let i = 0; i < lossColumns.length; i++) {
            const cell = cells[HEAD.length + i] as string;
            losses[lossColumns[i] as string] = cell === "" ? null : toNumber(cell, line);
        }
        rows.push({
            n: toNumber(cells[0] as string, line),
            trial: toNumber(cells[1] as string, line),
            losses,
        });
    }
    if (!sawSlopeLine) {
        throw new DataError("missing '# slope' summary line");
    }
    return { lossColumns, rows, summaryMedians, summarySlope };
}

export function readResults(path: string): ResultsTable {
    return parseResults(fs.readFileSync(path, "utf8"));
}

function toNumber(cell: string, context: string): number {
    const v = Number(cell);
    if (cell.trim() === "" || Number.isNaN(v)) {
        throw new DataError(`non-numeric cell "${cell}" in: ${context}`);
    }
    return v;
}
