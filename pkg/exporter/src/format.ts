/**
 * EREMEMB1 container: 8-byte ASCII magic "EREMEMB1", uint32 LE row count,
 * uint32 LE dimension, then count*dim IEEE-754 float32 LE values,
 * row-major, row order matching the id-map line order.
 */

const MAGIC = "EREMEMB1";
const HEADER_BYTES = 16;

export function encodeEremEmb(rows: Float32Array[], dim: number): Buffer {
    const buffer = Buffer.alloc(HEADER_BYTES + 4 * rows.length * dim);
    buffer.write(MAGIC, 0, "ascii");
    buffer.writeUInt32LE(rows.length, 8);
    buffer.writeUInt32LE(dim, 12);
    let offset = HEADER_BYTES;
    for (let i = 0; i < rows.length; i++) {
        const row = rows[i];
        if (row.length !== dim) {
            throw new Error(`row ${i} has ${row.length} values, expected ${dim}`);
        }
        for (let k = 0; k < dim; k++) {
            buffer.writeFloatLE(row[k], offset);
            offset += 4;
        }
    }
    return buffer;
}

export interface DecodedTable {
    count: number;
    dim: number;
    rows: Float32Array[];
}

export function decodeEremEmb(buffer: Buffer): DecodedTable {
    if (buffer.length < HEADER_BYTES || buffer.toString("ascii", 0, 8) !== MAGIC) {
        throw new Error("missing EREMEMB1 magic");
    }
    const count = buffer.readUInt32LE(8);
    const dim = buffer.readUInt32LE(12);
    const expected = HEADER_BYTES + 4 * count * dim;
    if (buffer.length !== expected) {
        throw new Error(`expected ${expected} bytes for ${count}x${dim}, found ${buffer.length}`);
    }
    const rows: Float32Array[] = [];
    let offset = HEADER_BYTES;
    for (let i = 0; i < count; i++) {
        const row = new Float32Array(dim);
        for (let k = 0; k < dim; k++) {
            row[k] = buffer.readFloatLE(offset);
            offset += 4;
        }
        rows.push(row);
    }
    return { count, dim, rows };
}
