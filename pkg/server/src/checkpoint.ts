/**
 * Checkpoint format and loader.
 *
 * A checkpoint is a plain JSON weights file for the model this backend serves:
 * a one-layer attention classifier over hashed character-piece embeddings.
 * Everything the forward pass needs is in the file — label set, geometry,
 * tokenizer piece width, the embedding table, per-head projections, the output
 * mix and the classifier — so two processes loading the same file are
 * guaranteed to serve identical answers.
 *
 * Piece embeddings are bucketed: a piece string maps to row
 * `fnv1a(piece) % embed_buckets` of the embedding table. The hash function is
 * part of the format; changing it would silently re-wire every embedding, so
 * it lives here next to the schema.
 */
import { readFileSync } from "node:fs";
import { z } from "zod";

export const CHECKPOINT_FORMAT = "spanex-checkpoint/1";

const matrix = z.array(z.array(z.number()).min(1)).min(1);

export const checkpointSchema = z.object({
  format: z.literal(CHECKPOINT_FORMAT),
  model: z.string().min(1),
  labels: z.array(z.string().min(1)).min(2),
  head_count: z.number().int().min(1),
  head_size: z.number().int().min(1),
  max_seq_len: z.number().int().min(8),
  piece_len: z.number().int().min(1),
  embed_buckets: z.number().int().min(2),
  aggregation: z.enum(["row-mean", "sum"]),
  embeddings: matrix,
  wq: z.array(matrix).min(1),
  wk: z.array(matrix).min(1),
  wv: z.array(matrix).min(1),
  wo: matrix,
  classifier: matrix,
  generator_seed: z.number().int().optional(),
});

export type Checkpoint = z.infer<typeof checkpointSchema>;

export class CheckpointError extends Error {}

function dims(m: number[][]): [number, number] {
  return [m.length, m[0]?.length ?? 0];
}

function expectDims(name: string, m: number[][], rows: number, cols: number): void {
  const [r, c] = dims(m);
  if (r !== rows || c !== cols) {
    throw new CheckpointError(`${name} is ${r}x${c}, expected ${rows}x${cols}`);
  }
  for (const row of m) {
    if (row.length !== c) {
      throw new CheckpointError(`${name} has ragged rows`);
    }
  }
}

/** Load and fully validate a checkpoint file; throws CheckpointError on any defect. */
export function loadCheckpoint(path: string): Checkpoint {
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch (err) {
    throw new CheckpointError(`cannot read checkpoint ${path}: ${(err as Error).message}`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch {
    throw new CheckpointError(`checkpoint ${path} is not valid JSON`);
  }
  const result = checkpointSchema.safeParse(parsed);
  if (!result.success) {
    const first = result.success === false ? result.error.issues[0] : undefined;
    const where = first ? `${first.path.join(".")}: ${first.message}` : "schema mismatch";
    throw new CheckpointError(`checkpoint ${path} is not a ${CHECKPOINT_FORMAT} file (${where})`);
  }
  const ck = result.data;
  const n = ck.head_count * ck.head_size;
  expectDims("embeddings", ck.embeddings, ck.embed_buckets, n);
  for (const [name, stack] of [["wq", ck.wq], ["wk", ck.wk], ["wv", ck.wv]] as const) {
    if (stack.length !== ck.head_count) {
      throw new CheckpointError(`${name} has ${stack.length} heads, expected ${ck.head_count}`);
    }
    stack.forEach((m, h) => expectDims(`${name}[${h}]`, m, n, ck.head_size));
  }
  expectDims("wo", ck.wo, n, n);
  expectDims("classifier", ck.classifier, n, ck.labels.length);
  return ck;
}

/** FNV-1a 32-bit. Bucket assignment for piece embeddings; part of the format. */
export function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}
