/**
 * Forward pass and the subword-to-word attention aggregation the wire serves.
 *
 * The model is a single attention layer over hashed piece embeddings with
 * sinusoidal positions, read out at [CLS] through a linear classifier. Small,
 * but structurally honest: per-head attention over a [CLS] p1 [SEP] p2 [SEP]
 * sequence, multi-piece words, and a hidden size that factors exactly into
 * head_count x head_size — everything a caller probing the protocol geometry
 * can legitimately ask about.
 *
 * Aggregation to word level ("row-mean", the default): within each word, rows
 * are averaged over the word's pieces and columns are summed; special-token
 * columns are dropped and each row is renormalized to sum 1. The alternative
 * "sum" scheme sums rows instead of averaging them. After row renormalization
 * the two coincide up to rounding — the row operation only rescales each row
 * by its piece count, which the final division cancels — but both names are
 * accepted so a config written for either convention reads back unambiguously.
 *
 * Everything is plain double arithmetic in a fixed evaluation order, so a
 * given checkpoint and input produce bit-identical output on every run.
 */
import type { Checkpoint } from "./checkpoint.js";
import { fnv1a } from "./checkpoint.js";
import { encodePair, type PairEncoding } from "./tokenizer.js";

export type AggregationScheme = "row-mean" | "sum";

export class TruncationError extends Error {
  readonly needed: number;
  readonly limit: number;
  constructor(needed: number, limit: number) {
    super(
      `input needs ${needed} subword positions but the model accepts at most ` +
        `${limit}; refusing to truncate silently`
    );
    this.needed = needed;
    this.limit = limit;
  }
}

export interface ModelConfig {
  checkpoint: Checkpoint;
  /** Override the checkpoint's sequence budget (e.g. to serve a shorter window). */
  maxSeqLen?: number;
  /** Override the checkpoint's aggregation scheme. */
  aggregation?: AggregationScheme;
}

export interface PredictOutput {
  probabilities: number[];
  predicted: number;
}

export interface EncodeOutput extends PredictOutput {
  /** head x T x T over words, row-stochastic, specials stripped. */
  attention: number[][][];
  cls: number[];
  boundary: number;
}

export interface Model {
  labels: string[];
  headCount: number;
  hiddenSize: number;
  maxSeqLen: number;
  aggregation: AggregationScheme;
  modelName: string;
  classifier: number[][];
  predict(part1: string[], part2: string[]): PredictOutput;
  encode(part1: string[], part2: string[]): EncodeOutput;
}

function matmul(a: number[][], b: number[][]): number[][] {
  const rows = a.length;
  const inner = b.length;
  const cols = b[0].length;
  const out: number[][] = new Array(rows);
  for (let i = 0; i < rows; i++) {
    const row = new Array<number>(cols).fill(0);
    for (let k = 0; k < inner; k++) {
      const aik = a[i][k];
      if (aik === 0) continue;
      const brow = b[k];
      for (let j = 0; j < cols; j++) row[j] += aik * brow[j];
    }
    out[i] = row;
  }
  return out;
}

function softmaxInPlace(row: number[]): void {
  let max = -Infinity;
  for (const v of row) if (v > max) max = v;
  let total = 0;
  for (let i = 0; i < row.length; i++) {
    row[i] = Math.exp(row[i] - max);
    total += row[i];
  }
  for (let i = 0; i < row.length; i++) row[i] /= total;
}

/** First index of the maximum — the wire promises predicted is an argmax. */
function argmax(row: number[]): number {
  let best = 0;
  for (let i = 1; i < row.length; i++) if (row[i] > row[best]) best = i;
  return best;
}

function sinusoidalPosition(pos: number, n: number): number[] {
  const out = new Array<number>(n);
  for (let k = 0; k < n; k += 2) {
    const rate = Math.pow(10000, k / n);
    out[k] = Math.sin(pos / rate);
    if (k + 1 < n) out[k + 1] = Math.cos(pos / rate);
  }
  return out;
}

/**
 * Collapse a subword attention matrix to word level.
 *
 * `subword` is S x S over the full piece sequence (specials included); the
 * result is T x T over words, T = wordSpans.length, rows renormalized to 1.
 */
export function aggregateAttention(
  subword: number[][],
  spans: { start: number; end: number }[],
  scheme: AggregationScheme
): number[][] {
  const t = spans.length;
  const out: number[][] = new Array(t);
  for (let w = 0; w < t; w++) {
    const { start, end } = spans[w];
    const row = new Array<number>(t).fill(0);
    for (let v = 0; v < t; v++) {
      let mass = 0;
      for (let i = start; i < end; i++) {
        for (let j = spans[v].start; j < spans[v].end; j++) mass += subword[i][j];
      }
      row[v] = scheme === "row-mean" ? mass / (end - start) : mass;
    }
    let total = 0;
    for (const v of row) total += v;
    for (let v = 0; v < t; v++) row[v] /= total;
    out[w] = row;
  }
  return out;
}

export function createModel(cfg: ModelConfig): Model {
  const ck = cfg.checkpoint;
  const n = ck.head_count * ck.head_size;
  const maxSeqLen = cfg.maxSeqLen ?? ck.max_seq_len;
  const aggregation = cfg.aggregation ?? ck.aggregation;
  const scale = 1 / Math.sqrt(ck.head_size);

  function embed(encoding: PairEncoding): number[][] {
    const x: number[][] = new Array(encoding.pieces.length);
    for (let pos = 0; pos < encoding.pieces.length; pos++) {
      const base = ck.embeddings[fnv1a(encoding.pieces[pos]) % ck.embed_buckets];
      const pe = sinusoidalPosition(pos, n);
      const row = new Array<number>(n);
      for (let d = 0; d < n; d++) row[d] = base[d] + pe[d];
      x[pos] = row;
    }
    return x;
  }

  interface Forward {
    encoding: PairEncoding;
    headAttention: number[][][]; // head x S x S over pieces
    cls: number[];
    probabilities: number[];
    predicted: number;
  }

  function forward(part1: string[], part2: string[]): Forward {
    const encoding = encodePair(part1, part2, ck.piece_len);
    const s = encoding.pieces.length;
    if (s > maxSeqLen) throw new TruncationError(s, maxSeqLen);
    const x = embed(encoding);

    const headAttention: number[][][] = new Array(ck.head_count);
    const context: number[][] = x.map(() => new Array<number>(n).fill(0));
    for (let h = 0; h < ck.head_count; h++) {
      const q = matmul(x, ck.wq[h]);
      const k = matmul(x, ck.wk[h]);
      const v = matmul(x, ck.wv[h]);
      const att: number[][] = new Array(s);
      for (let i = 0; i < s; i++) {
        const row = new Array<number>(s);
        for (let j = 0; j < s; j++) {
          let dot = 0;
          for (let d = 0; d < ck.head_size; d++) dot += q[i][d] * k[j][d];
          row[j] = dot * scale;
        }
        softmaxInPlace(row);
        att[i] = row;
      }
      headAttention[h] = att;
      const mixed = matmul(att, v); // S x head_size
      const offset = h * ck.head_size;
      for (let i = 0; i < s; i++) {
        for (let d = 0; d < ck.head_size; d++) context[i][offset + d] = mixed[i][d];
      }
    }

    const out = matmul(context, ck.wo);
    const cls = out[0];
    const logits = new Array<number>(ck.labels.length).fill(0);
    for (let d = 0; d < n; d++) {
      for (let y = 0; y < ck.labels.length; y++) logits[y] += cls[d] * ck.classifier[d][y];
    }
    softmaxInPlace(logits);
    return {
      encoding,
      headAttention,
      cls,
      probabilities: logits,
      predicted: argmax(logits),
    };
  }

  return {
    labels: [...ck.labels],
    headCount: ck.head_count,
    hiddenSize: n,
    maxSeqLen,
    aggregation,
    modelName: ck.model,
    classifier: ck.classifier,
    predict(part1, part2) {
      const f = forward(part1, part2);
      return { probabilities: f.probabilities, predicted: f.predicted };
    },
    encode(part1, part2) {
      const f = forward(part1, part2);
      const attention = f.headAttention.map((a) =>
        aggregateAttention(a, f.encoding.wordSpans, aggregation)
      );
      return {
        attention,
        cls: f.cls,
        probabilities: f.probabilities,
        predicted: f.predicted,
        boundary: f.encoding.boundary,
      };
    },
  };
}
