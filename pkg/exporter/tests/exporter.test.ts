import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { runCli } from "../src/cli";
import { Encoder, HashedGaussianEncoder, loadEncoder } from "../src/encoders";
import { runExport } from "../src/exporter";
import { decodeEremEmb } from "../src/format";
import { parseIdMap } from "../src/idmap";

let workDir: string;

beforeAll(() => {
    workDir = fs.mkdtempSync(path.join(os.tmpdir(), "erem-export-"));
});

afterAll(() => {
    fs.rmSync(workDir, { recursive: true, force: true });
});

function writeIds(name: string, rows: Array<[number, string]>): string {
    const file = path.join(workDir, name);
    fs.writeFileSync(file, rows.map(([id, text]) => `${id}\t${text}`).join("\n") + "\n");
    return file;
}

describe("id map parsing", () => {
    it("keeps file order and raw ids", () => {
        const file = writeIds("ids.tsv", [[7, "b"], [3, "a"], [9, "c"]]);
        expect(parseIdMap(file)).toEqual([
            { id: 7, name: "b" },
            { id: 3, name: "a" },
            { id: 9, name: "c" },
        ]);
    });

    it("reports malformed lines with their number", () => {
        const file = path.join(workDir, "bad.tsv");
        fs.writeFileSync(file, "0\ta\nnope\n");
        expect(() => parseIdMap(file)).toThrow(/line 2/);
        fs.writeFileSync(file, "-4\ta\n");
        expect(() => parseIdMap(file)).toThrow(/non-negative/);
    });
});

describe("export", () => {
    it("writes count and dim for a three-name input", async () => {
        const ids = writeIds("three.tsv", [[0, "杜兰大学"], [1, "Tulane University"], [2, "国家"]]);
        const out = path.join(workDir, "three.bin");
        const encoder = new HashedGaussianEncoder(16);
        const info = await runExport({ idsPath: ids, outPath: out, encoder, batchSize: 2, normalize: false });
        expect(info).toEqual({ count: 3, dim: 16 });
        const decoded = decodeEremEmb(fs.readFileSync(out));
        expect(decoded.count).toBe(3);
        expect(decoded.dim).toBe(16);
    });

    it("round-trips the encoder output through the file exactly", async () => {
        const names: Array<[number, string]> = [[5, "alpha"], [6, "beta"], [7, "gamma"]];
        const ids = writeIds("rt.tsv", names);
        const out = path.join(workDir, "rt.bin");
        const encoder = new HashedGaussianEncoder(12);
        await runExport({ idsPath: ids, outPath: out, encoder, batchSize: 64, normalize: false });
        const direct = await encoder.encode(names.map(([, n]) => n));
        const decoded = decodeEremEmb(fs.readFileSync(out));
        for (let i = 0; i < names.length; i++) {
            expect(Array.from(decoded.rows[i])).toEqual(Array.from(direct[i]));
        }
    });

    it("normalizes rows to unit length within 1e-5", async () => {
        const ids = writeIds("norm.tsv", [[0, "x"], [1, "y"], [2, "z"]]);
        const out = path.join(workDir, "norm.bin");
        await runExport({
            idsPath: ids, outPath: out,
            encoder: new HashedGaussianEncoder(24), batchSize: 2, normalize: true,
        });
        for (const row of decodeEremEmb(fs.readFileSync(out)).rows) {
            const norm = Math.sqrt(row.reduce((acc, v) => acc + v * v, 0));
            expect(Math.abs(norm - 1)).toBeLessThan(1e-5);
        }
    });

    it("is deterministic and batch-size independent", async () => {
        const rows: Array<[number, string]> = Array.from({ length: 37 }, (_, i) => [i, `name ${i}`]);
        const ids = writeIds("det.tsv", rows);
        const byBatch: Buffer[] = [];
        for (const batch of [1, 8, 64]) {
            const out = path.join(workDir, `det-${batch}.bin`);
            await runExport({
                idsPath: ids, outPath: out,
                encoder: new HashedGaussianEncoder(10), batchSize: batch, normalize: true,
            });
            byBatch.push(fs.readFileSync(out));
        }
        expect(byBatch[0].equals(byBatch[1])).toBe(true);
        expect(byBatch[1].equals(byBatch[2])).toBe(true);
    });

    it("keeps output row order equal to input id order", async () => {
        const shuffled: Array<[number, string]> = [[42, "last"], [0, "first"], [7, "mid"]];
        const ids = writeIds("order.tsv", shuffled);
        const out = path.join(workDir, "order.bin");
        const encoder = new HashedGaussianEncoder(8);
        await runExport({ idsPath: ids, outPath: out, encoder, batchSize: 64, normalize: false });
        const direct = await encoder.encode(["last", "first", "mid"]);
        const decoded = decodeEremEmb(fs.readFileSync(out));
        expect(Array.from(decoded.rows[0])).toEqual(Array.from(direct[0]));
        expect(Array.from(decoded.rows[1])).toEqual(Array.from(direct[1]));
    });

    it("handles an id map at the ZH-side scale (19,388 rows)", async () => {
        const rows: Array<[number, string]> = Array.from({ length: 19388 }, (_, i) => [i, `entity ${i}`]);
        const ids = writeIds("zh-scale.tsv", rows);
        const out = path.join(workDir, "zh-scale.bin");
        const info = await runExport({
            idsPath: ids, outPath: out,
            encoder: new HashedGaussianEncoder(32), batchSize: 512, normalize: true,
        });
        expect(info.count).toBe(19388);
        const buffer = fs.readFileSync(out);
        expect(buffer.readUInt32LE(8)).toBe(19388);
        expect(buffer.readUInt32LE(12)).toBe(32);
    });

    it("aborts with the row number when a row fails to encode", async () => {
        const ids = writeIds("boom.tsv", [[0, "fine"], [1, "explode"], [2, "fine too"]]);
        const fragile: Encoder = {
            dim: 4,
            async encode(texts: string[]): Promise<Float32Array[]> {
                return texts.map((t) => {
                    if (t === "explode") throw new Error("tokenizer choked");
                    return Float32Array.from([1, 2, 3, 4]);
                });
            },
        };
        await expect(
            runExport({
                idsPath: ids, outPath: path.join(workDir, "boom.bin"),
                encoder: fragile, batchSize: 64, normalize: false,
            })
        ).rejects.toThrow(/row 2 \(id 1\)/);
    });
});

describe("cli", () => {
    it("exports through the command surface", async () => {
        const ids = writeIds("cli.tsv", [[0, "a"], [1, "b"], [2, "c"]]);
        const out = path.join(workDir, "cli.bin");
        const code = await runCli([
            "export", "--ids", ids, "--out", out, "--model", "hash-v1:16", "--normalize", "--batch", "2",
        ]);
        expect(code).toBe(0);
        expect(decodeEremEmb(fs.readFileSync(out)).count).toBe(3);
    });

    it("fails with a nonzero exit on an unknown model", async () => {
        const ids = writeIds("cli2.tsv", [[0, "a"]]);
        const code = await runCli([
            "export", "--ids", ids, "--out", path.join(workDir, "cli2.bin"), "--model", "no-such-model",
        ]);
        expect(code).toBe(1);
    });

    it("fails with a nonzero exit when the pretrained encoder is unavailable", async () => {
        await expect(loadEncoder("tfjs-use")).rejects.toThrow(/model load failure/);
    });

    it("rejects bad flags with a usage error", async () => {
        expect(await runCli(["export", "--ids", "x"])).toBe(2);
        expect(await runCli(["align"])).toBe(2);
        expect(await runCli(["export", "--ids", "a", "--out", "b", "--model", "hash-v1:8", "--batch", "0"])).toBe(2);
    });
});
