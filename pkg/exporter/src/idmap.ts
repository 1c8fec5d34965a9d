import * as fs from "fs";

export interface IdMapRow {
    id: number;
    name: string;
}

/** Parse an `id<TAB>name` file; row order is preserved as written. */
export function parseIdMap(path: string): IdMapRow[] {
    const text = fs.readFileSync(path, "utf-8");
    const rows: IdMapRow[] = [];
    const lines = text.split("\n");
    for (let i = 0; i < lines.length; i++) {
        const line = lines[i].replace(/\r$/, "");
        if (line === "") continue;
        const cols = line.split("\t");
        if (cols.length !== 2) {
            throw new Error(`${path}: line ${i + 1}: expected 2 tab-separated columns, got ${cols.length}`);
        }
        const id = Number(cols[0]);
        if (!Number.isInteger(id) || id < 0) {
            throw new Error(`${path}: line ${i + 1}: id '${cols[0]}' is not a non-negative integer`);
        }
        rows.push({ id, name: cols[1] });
    }
    return rows;
}
