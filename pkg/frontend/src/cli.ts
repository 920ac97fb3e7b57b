// Entry points for the two plot commands. Exit codes follow the
// harness's convention: 0 done, 2 validation problems (flags, schema,
// data), 3 I/O failures.

import { DataError, readResults } from "./csv.js";
import { writeFigure } from "./io.js";
import { buildLossesFigure, buildRateFigure } from "./plot.js";

function parseFlags(argv: string[], known: string[]): Map<string, string> {
    const out = new Map<string, string>();
    for (let i = 0; i < argv.length; i += 2) {
        const flag = argv[i] as string;
        const value = argv[i + 1];
        if (!known.includes(flag)) {
            throw new UsageError(`unknown flag ${flag}`);
        }
        if (value === undefined) {
            throw new UsageError(`flag ${flag} needs a value`);
        }
        out.set(flag.slice(2), value);
    }
    return out;
}

class UsageError extends Error {}

function require(flags: Map<string, string>, name: string): string {
    const v = flags.get(name);
    if (v === undefined) {
        throw new UsageError(`--${name} is required`);
    }
    return v;
}

function run(usage: string, argv: string[], known: string[],
    body: (flags: Map<string, string>) => void): number {
    try {
        body(parseFlags(argv, known));
        return 0;
    } catch (err) {
        if (err instanceof UsageError) {
            console.error(`error: ${err.message}`);
            console.error(`usage: ${usage}`);
            return 2;
        }
        if (err instanceof DataError) {
            console.error(`error: ${err.message}`);
            return 2;
        }
        if (err instanceof Error && "code" in err) {
            console.error(`io error: ${err.message}`);
            return 3;
        }
        throw err;
    }
}

export function mainRate(argv: string[]): number {
    return run("plot-rate --csv results.csv [--loss l_max] --out rate.png",
        argv, ["--csv", "--loss", "--out"], (flags) => {
            const table = readResults(require(flags, "csv"));
            const { figure, slope } = buildRateFigure(table, flags.get("loss") ?? "l_max");
            const out = require(flags, "out");
            writeFigure(out, figure);
            console.log(slope === null
                ? `wrote ${out} (single group, slope omitted)`
                : `wrote ${out} (slope ${slope.toFixed(3)})`);
        });
}

export function mainLosses(argv: string[]): number {
    return run("plot-losses --csv results.csv [--losses l_max,l_one] --out losses.png",
        argv, ["--csv", "--losses", "--out"], (flags) => {
            const table = readResults(require(flags, "csv"));
            const picked = flags.get("losses");
            const losses = picked === undefined
                ? table.lossColumns
                : picked.split(",").filter((s) => s.length > 0);
            const { figure, curves } = buildLossesFigure(table, losses);
            const out = require(flags, "out");
            writeFigure(out, figure);
            console.log(`wrote ${out} (${curves.length} curves)`);
        });
}
