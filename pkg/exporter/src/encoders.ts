import { createHash } from "crypto";

/** A batch text encoder with a fixed output dimension. */
export interface Encoder {
    readonly dim: number;
    encode(texts: string[]): Promise<Float32Array[]>;
}

/**
 * Deterministic lexical encoder: each text is expanded through counted
 * SHA-256 blocks into uniform draws, then mapped to gaussians.  Stable
 * across platforms and runs, so exports are byte-reproducible.  It carries
 * no semantics; it exists for tests, dry runs, and plumbing checks.
 */
export class HashedGaussianEncoder implements Encoder {
    constructor(readonly dim: number) {
        if (!Number.isInteger(dim) || dim < 2) {
            throw new Error(`hash encoder dimension must be an integer >= 2, got ${dim}`);
        }
    }

    private uniforms(text: string, count: number): Float64Array {
        const out = new Float64Array(count);
        let produced = 0;
        for (let block = 0; produced < count; block++) {
            const digest = createHash("sha256")
                .update(text, "utf-8")
                .update(Buffer.from([0, block & 0xff, (block >> 8) & 0xff]))
                .digest();
            for (let i = 0; i + 4 <= digest.length && produced < count; i += 4) {
                // (x + 0.5) / 2^32 stays strictly inside (0, 1)
                out[produced++] = (digest.readUInt32LE(i) + 0.5) / 4294967296;
            }
        }
        return out;
    }

    private encodeOne(text: string): Float32Array {
        const pairs = Math.ceil(this.dim / 2);
        const u = this.uniforms(text, 2 * pairs);
        const row = new Float32Array(this.dim);
        for (let p = 0; p < pairs; p++) {
            const radius = Math.sqrt(-2 * Math.log(u[2 * p]));
            const angle = 2 * Math.PI * u[2 * p + 1];
            row[2 * p] = radius * Math.cos(angle);
            if (2 * p + 1 < this.dim) {
                row[2 * p + 1] = radius * Math.sin(angle);
            }
        }
        return row;
    }

    async encode(texts: string[]): Promise<Float32Array[]> {
        return texts.map((t) => this.encodeOne(t));
    }
}

/**
 * Adapter for a tfjs universal-sentence-encoder checkpoint.  The heavy
 * packages are loaded lazily; a missing install or missing weights
 * surfaces as a model-load error, never as a silent fallback.
 */
export class TfjsSentenceEncoder implements Encoder {
    private constructor(private model: { embed(texts: string[]): Promise<any> }, readonly dim: number) {}

    static async load(): Promise<TfjsSentenceEncoder> {
        // specifiers kept out of literal position: both packages are optional
        const dynamicImport = (name: string): Promise<any> => import(name);
        try {
            await dynamicImport("@tensorflow/tfjs");
            const use = await dynamicImport("@tensorflow-models/universal-sentence-encoder");
            const model = await use.load();
            const probe = await model.embed(["probe"]);
            const dim = probe.shape[1];
            probe.dispose();
            return new TfjsSentenceEncoder(model, dim);
        } catch (err) {
            throw new Error(`model load failure: tfjs sentence encoder unavailable (${err})`);
        }
    }

    async encode(texts: string[]): Promise<Float32Array[]> {
        const tensor = await this.model.embed(texts);
        const data: Float32Array = await tensor.data();
        tensor.dispose();
        const rows: Float32Array[] = [];
        for (let i = 0; i < texts.length; i++) {
            rows.push(data.slice(i * this.dim, (i + 1) * this.dim));
        }
        return rows;
    }
}

/**
 * Resolve a model identifier: `hash-v1:<dim>` for the deterministic
 * encoder, `tfjs-use` for the pretrained multilingual sentence encoder.
 */
export async function loadEncoder(model: string): Promise<Encoder> {
    const hashMatch = /^hash-v1:(\d+)$/.exec(model);
    if (hashMatch) {
        return new HashedGaussianEncoder(Number(hashMatch[1]));
    }
    if (model === "tfjs-use") {
        return TfjsSentenceEncoder.load();
    }
    throw new Error(`model load failure: unknown model identifier '${model}'`);
}
