import fs from "fs";
import path from "path";
import { readCsv } from "./csv";
import { FigureKind, render } from "./render";

const USAGE = "usage: plot <heatmap|signal|overlaps> <csv> -o <output.svg>";

export function main(argv: string[]): number {
    const args = [...argv];
    let out = "";
    const flag = args.indexOf("-o");
    if (flag >= 0) {
        out = args[flag + 1] ?? "";
        args.splice(flag, 2);
    }
    const [kind, csvPath] = args;
    if (!kind || !csvPath) {
        console.error(USAGE);
        return 1;
    }
    if (!["heatmap", "signal", "overlaps"].includes(kind)) {
        console.error(`unknown figure kind '${kind}'\n${USAGE}`);
        return 1;
    }
    if (!out) {
        out = csvPath.replace(/\.csv$/, "") + ".svg";
    }
    try {
        const table = readCsv(csvPath);
        const svg = render(kind as FigureKind, table);
        fs.mkdirSync(path.dirname(path.resolve(out)), { recursive: true });
        fs.writeFileSync(out, svg);
    } catch (err) {
        console.error(`plot ${kind}: ${(err as Error).message}`);
        return 1;
    }
    console.log(out);
    return 0;
}

if (require.main === module) {
    process.exit(main(process.argv.slice(2)));
}
