/**
 * Generate the committed demo checkpoint.
 *
 * Weights are drawn from a seeded PRNG (mulberry32) with fan-in scaling, then
 * rounded to six decimals so the file is byte-stable across platforms. The
 * generator is deterministic end to end: the same seed always writes the same
 * file, and the test suite regenerates it and byte-compares against the
 * committed copy. No training happens here — the served model is a randomly
 * initialized classifier, which is all the protocol work needs; swap in any
 * other file with the same format to serve a real one.
 *
 * Usage: node dist/tools/make_checkpoint.js [OUT] [SEED]
 */
import { writeFileSync } from "node:fs";
import { CHECKPOINT_FORMAT, type Checkpoint } from "../src/checkpoint.js";

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const round6 = (v: number) => Number(v.toFixed(6));

function randMatrix(rng: () => number, rows: number, cols: number, scale: number): number[][] {
  const out: number[][] = new Array(rows);
  for (let i = 0; i < rows; i++) {
    const row = new Array<number>(cols);
    for (let j = 0; j < cols; j++) row[j] = round6((rng() * 2 - 1) * scale);
    out[i] = row;
  }
  return out;
}

export function makeCheckpoint(seed: number): Checkpoint {
  const rng = mulberry32(seed);
  const headCount = 4;
  const headSize = 8;
  const n = headCount * headSize;
  const buckets = 256;
  const fanIn = 1 / Math.sqrt(n);
  return {
    format: CHECKPOINT_FORMAT,
    model: `tiny-pair-${n}x${headCount}`,
    labels: ["Entailment", "Neutral", "Contradiction"],
    head_count: headCount,
    head_size: headSize,
    max_seq_len: 48,
    piece_len: 4,
    embed_buckets: buckets,
    aggregation: "row-mean",
    embeddings: randMatrix(rng, buckets, n, 1),
    wq: Array.from({ length: headCount }, () => randMatrix(rng, n, headSize, fanIn)),
    wk: Array.from({ length: headCount }, () => randMatrix(rng, n, headSize, fanIn)),
    wv: Array.from({ length: headCount }, () => randMatrix(rng, n, headSize, fanIn)),
    wo: randMatrix(rng, n, n, fanIn),
    classifier: randMatrix(rng, n, 3, fanIn),
    generator_seed: seed,
  };
}

const out = process.argv[2] ?? "checkpoint.json";
const seed = process.argv[3] !== undefined ? Number(process.argv[3]) : 7;
if (!Number.isInteger(seed)) {
  process.stderr.write(`make_checkpoint: seed must be an integer, got ${process.argv[3]}\n`);
  process.exit(2);
}
const ck = makeCheckpoint(seed);
writeFileSync(out, JSON.stringify(ck) + "\n");
process.stdout.write(`wrote ${out} (model ${ck.model}, seed ${seed})\n`);
