/**
 * Deterministic fixed-width subword splitter.
 *
 * Real checkpoints carry learned merge tables; this backend instead splits
 * every word into character pieces of at most `pieceLen` characters, with
 * continuations marked "##" the usual way:
 *
 *   children  ->  chil ##dren
 *   a         ->  a
 *
 * The split is content-independent and involves no vocabulary, so the same
 * word always produces the same pieces on every platform — and any word longer
 * than `pieceLen` exercises the subword-to-word aggregation path for free.
 * Note the "##" marker is part of the piece string fed to the embedding hash,
 * so "chil" as a word start and "##chil" as a continuation embed differently,
 * just as they would with a learned vocabulary.
 */

export const CLS = "[CLS]";
export const SEP = "[SEP]";

/** Subword slice [start, end) covering one word, indices into the piece sequence. */
export interface WordSpan {
  start: number;
  end: number;
}

export interface PairEncoding {
  /** Full piece sequence: [CLS] part1-pieces [SEP] part2-pieces [SEP]. */
  pieces: string[];
  /** One span per word, part1 words then part2 words. */
  wordSpans: WordSpan[];
  /** Word index where part2 begins; equals the part1 word count. */
  boundary: number;
}

export function splitWord(word: string, pieceLen: number): string[] {
  const pieces: string[] = [];
  for (let i = 0; i < word.length; i += pieceLen) {
    const chunk = word.slice(i, i + pieceLen);
    pieces.push(i === 0 ? chunk : "##" + chunk);
  }
  return pieces;
}

export function encodePair(part1: string[], part2: string[], pieceLen: number): PairEncoding {
  const pieces: string[] = [CLS];
  const wordSpans: WordSpan[] = [];
  const push = (word: string) => {
    const ps = splitWord(word, pieceLen);
    wordSpans.push({ start: pieces.length, end: pieces.length + ps.length });
    pieces.push(...ps);
  };
  for (const w of part1) push(w);
  pieces.push(SEP);
  for (const w of part2) push(w);
  pieces.push(SEP);
  return { pieces, wordSpans, boundary: part1.length };
}
