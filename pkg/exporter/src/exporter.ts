import * as fs from "fs";
import { Encoder } from "./encoders";
import { encodeEremEmb } from "./format";
import { parseIdMap } from "./idmap";

export interface ExportJob {
    idsPath: string;
    outPath: string;
    encoder: Encoder;
    batchSize: number;
    normalize: boolean;
}

function normalizeRow(row: Float32Array): Float32Array {
    let sum = 0;
    for (let k = 0; k < row.length; k++) sum += row[k] * row[k];
    const norm = Math.sqrt(sum);
    if (norm === 0) {
        throw new Error("cannot normalize a zero vector");
    }
    const out = new Float32Array(row.length);
    for (let k = 0; k < row.length; k++) out[k] = row[k] / norm;
    return out;
}

/**
 * Encode every name in the id map, in file order, and write the table.
 * An encoding failure aborts with the 1-based row number and the raw id.
 */
export async function runExport(job: ExportJob): Promise<{ count: number; dim: number }> {
    const rows = parseIdMap(job.idsPath);
    const vectors: Float32Array[] = [];
    for (let start = 0; start < rows.length; start += job.batchSize) {
        const batch = rows.slice(start, start + job.batchSize);
        let encoded: Float32Array[];
        try {
            encoded = await job.encoder.encode(batch.map((r) => r.name));
        } catch (err) {
            // narrow the failure down to one row before giving up
            for (let i = 0; i < batch.length; i++) {
                try {
                    await job.encoder.encode([batch[i].name]);
                } catch (rowErr) {
                    throw new Error(
                        `encoding failed at row ${start + i + 1} (id ${batch[i].id}): ${rowErr}`
                    );
                }
            }
            throw new Error(`encoding failed in batch starting at row ${start + 1}: ${err}`);
        }
        if (encoded.length !== batch.length) {
            throw new Error(`encoder returned ${encoded.length} rows for a batch of ${batch.length}`);
        }
        for (let i = 0; i < encoded.length; i++) {
            let row = encoded[i];
            if (row.length !== job.encoder.dim) {
                throw new Error(
                    `encoding failed at row ${start + i + 1} (id ${batch[i].id}): ` +
                        `got ${row.length} values, expected ${job.encoder.dim}`
                );
            }
            if (job.normalize) {
                row = normalizeRow(row);
            }
            vectors.push(row);
        }
    }
    fs.writeFileSync(job.outPath, encodeEremEmb(vectors, job.encoder.dim));
    return { count: vectors.length, dim: job.encoder.dim };
}
