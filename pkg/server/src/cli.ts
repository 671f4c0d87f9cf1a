#!/usr/bin/env node
/**
 * `spanex-server --checkpoint PATH --port N`
 *
 * Loads one checkpoint, stands up the HTTP endpoints, and prints the bound
 * address. One process serves one model instance; requests queue on the
 * single JavaScript thread, which is what makes repeat responses bit-identical
 * without any locking.
 */
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { loadCheckpoint, CheckpointError } from "./checkpoint.js";
import { createModel, type AggregationScheme } from "./model.js";
import { createApp } from "./server.js";

interface CliArgs {
  checkpoint: string;
  port: number;
  host: string;
  device: string;
  maxSeqLen?: number;
  aggregation?: AggregationScheme;
}

export function main(argv: string[]): void {
  const parsed = yargs(argv)
    .scriptName("spanex-server")
    .usage("$0 --checkpoint PATH --port N")
    .option("checkpoint", {
      type: "string",
      demandOption: true,
      describe: "path to a spanex-checkpoint/1 JSON weights file",
    })
    .option("port", {
      type: "number",
      default: 8414,
      describe: "TCP port to bind; 0 picks a free one",
    })
    .option("host", { type: "string", default: "127.0.0.1" })
    .option("device", {
      type: "string",
      default: "cpu",
      describe: "compute device; this backend ships cpu kernels only",
    })
    .option("max-seq-len", {
      type: "number",
      describe: "override the checkpoint's subword sequence budget",
    })
    .option("aggregation", {
      type: "string",
      choices: ["row-mean", "sum"],
      describe: "subword-to-word scheme (default: the checkpoint's)",
    })
    .strict()
    .help()
    .parseSync() as Record<string, unknown>;

  const args: CliArgs = {
    checkpoint: parsed.checkpoint as string,
    port: parsed.port as number,
    host: parsed.host as string,
    device: parsed.device as string,
    maxSeqLen: parsed.maxSeqLen as number | undefined,
    aggregation: parsed.aggregation as AggregationScheme | undefined,
  };

  if (args.device !== "cpu") {
    process.stderr.write(`spanex-server: unknown device ${JSON.stringify(args.device)}; only cpu is available\n`);
    process.exit(2);
  }
  if (!Number.isInteger(args.port) || args.port < 0 || args.port > 65535) {
    process.stderr.write(`spanex-server: port must be an integer in 0..65535, got ${args.port}\n`);
    process.exit(2);
  }

  let model;
  try {
    model = createModel({
      checkpoint: loadCheckpoint(args.checkpoint),
      maxSeqLen: args.maxSeqLen,
      aggregation: args.aggregation,
    });
  } catch (err) {
    if (err instanceof CheckpointError) {
      process.stderr.write(`spanex-server: ${err.message}\n`);
      process.exit(1);
    }
    throw err;
  }

  const app = createApp(model);
  const server = app.listen(args.port, args.host, () => {
    const address = server.address();
    const port = typeof address === "object" && address !== null ? address.port : args.port;
    process.stdout.write(
      `spanex-server: serving ${model.modelName} (${model.headCount} heads, hidden ${model.hiddenSize}, ` +
        `max ${model.maxSeqLen} subwords, ${model.aggregation} aggregation)\n`
    );
    process.stdout.write(`spanex-server: listening on http://${args.host}:${port}\n`);
  });

  const stop = () => server.close(() => process.exit(0));
  process.on("SIGINT", stop);
  process.on("SIGTERM", stop);
}

main(hideBin(process.argv));
