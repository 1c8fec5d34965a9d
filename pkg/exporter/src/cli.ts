import { loadEncoder } from "./encoders";
import { runExport } from "./exporter";

const USAGE =
    "Usage: erem-embed-export export --ids PATH --out PATH --model NAME [--normalize] [--batch N]";

interface Flags {
    ids?: string;
    out?: string;
    model?: string;
    normalize: boolean;
    batch: number;
}

export function parseArgs(argv: string[]): Flags {
    if (argv[0] !== "export") {
        throw new Error(USAGE);
    }
    const flags: Flags = { normalize: false, batch: 64 };
    for (let i = 1; i < argv.length; i++) {
        const arg = argv[i];
        const next = () => {
            i++;
            if (i >= argv.length) throw new Error(`${arg} needs a value\n${USAGE}`);
            return argv[i];
        };
        if (arg === "--ids") flags.ids = next();
        else if (arg === "--out") flags.out = next();
        else if (arg === "--model") flags.model = next();
        else if (arg === "--normalize") flags.normalize = true;
        else if (arg === "--batch") {
            flags.batch = Number(next());
            if (!Number.isInteger(flags.batch) || flags.batch < 1) {
                throw new Error(`--batch must be a positive integer\n${USAGE}`);
            }
        } else throw new Error(`unknown flag ${arg}\n${USAGE}`);
    }
    if (!flags.ids || !flags.out || !flags.model) {
        throw new Error(`--ids, --out and --model are required\n${USAGE}`);
    }
    return flags;
}

export async function runCli(argv: string[]): Promise<number> {
    let flags: Flags;
    try {
        flags = parseArgs(argv);
    } catch (err) {
        console.error(String(err instanceof Error ? err.message : err));
        return 2;
    }
    try {
        const encoder = await loadEncoder(flags.model!);
        const { count, dim } = await runExport({
            idsPath: flags.ids!,
            outPath: flags.out!,
            encoder,
            batchSize: flags.batch,
            normalize: flags.normalize,
        });
        console.log(`wrote ${flags.out}: ${count} rows, dim ${dim}`);
        return 0;
    } catch (err) {
        console.error(String(err instanceof Error ? err.message : err));
        return 1;
    }
}

if (require.main === module) {
    runCli(process.argv.slice(2)).then((code) => {
        process.exitCode = code;
    });
}
