import fs from "fs";

export interface Table {
    columns: string[];
    rows: number[][];
}

/** Read a plain numeric CSV with a single header line. */
export function readCsv(path: string): Table {
    const text = fs.readFileSync(path, "utf-8");
    return parseCsv(text);
}

export function parseCsv(text: string): Table {
    const lines = text.split("\n").filter((line) => line.trim().length > 0);
    if (lines.length === 0) {
        throw new Error("CSV is empty: no header line");
    }
    const columns = lines[0].split(",").map((c) => c.trim());
    const rows = lines.slice(1).map((line, k) => {
        const cells = line.split(",").map(Number);
        if (cells.length !== columns.length || cells.some((x) => Number.isNaN(x))) {
            throw new Error(`CSV row ${k + 2} does not match the header`);
        }
        return cells;
    });
    return { columns, rows };
}

/** Index of a named column, or an error naming what is missing. */
export function columnIndex(table: Table, name: string): number {
    const idx = table.columns.indexOf(name);
    if (idx < 0) {
        throw new Error(`missing column '${name}' (have: ${table.columns.join(", ")})`);
    }
    return idx;
}

export function column(table: Table, name: string): number[] {
    const idx = columnIndex(table, name);
    return table.rows.map((row) => row[idx]);
}
