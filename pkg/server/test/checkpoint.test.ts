import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { afterAll, describe, expect, it } from "vitest";
import { CheckpointError, fnv1a, loadCheckpoint } from "../src/checkpoint.js";
import { checkpointPath, makeCheckpointPath } from "./helpers.js";

const scratch = mkdtempSync(path.join(tmpdir(), "spanex-ck-"));
afterAll(() => rmSync(scratch, { recursive: true, force: true }));

describe("the committed checkpoint", () => {
  it("regenerates byte-identically from the recorded seed", () => {
    const committed = loadCheckpoint(checkpointPath);
    expect(committed.generator_seed).toBeDefined();
    const regenerated = path.join(scratch, "regen.json");
    const result = spawnSync(
      "node",
      [makeCheckpointPath, regenerated, String(committed.generator_seed)],
      { encoding: "utf8" }
    );
    expect(result.status, result.stderr).toBe(0);
    expect(readFileSync(regenerated, "utf8")).toBe(readFileSync(checkpointPath, "utf8"));
  });

  it("loads with consistent geometry", () => {
    const ck = loadCheckpoint(checkpointPath);
    const n = ck.head_count * ck.head_size;
    expect(ck.embeddings).toHaveLength(ck.embed_buckets);
    expect(ck.embeddings[0]).toHaveLength(n);
    expect(ck.wq).toHaveLength(ck.head_count);
    expect(ck.wo).toHaveLength(n);
    expect(ck.classifier[0]).toHaveLength(ck.labels.length);
  });
});

describe("loadCheckpoint rejections", () => {
  const valid = () => JSON.parse(readFileSync(checkpointPath, "utf8"));

  function expectLoadError(doctored: unknown, pattern: RegExp): void {
    const file = path.join(scratch, "bad.json");
    writeFileSync(file, typeof doctored === "string" ? doctored : JSON.stringify(doctored));
    let caught: unknown;
    try {
      loadCheckpoint(file);
    } catch (err) {
      caught = err;
    }
    expect(caught).toBeInstanceOf(CheckpointError);
    expect((caught as Error).message).toMatch(pattern);
  }

  it("missing file", () => {
    expect(() => loadCheckpoint(path.join(scratch, "nope.json"))).toThrow(CheckpointError);
  });

  it("invalid JSON", () => {
    expectLoadError("{truncated", /not valid JSON/);
  });

  it("wrong format tag", () => {
    const ck = valid();
    ck.format = "somebody-elses/9";
    expectLoadError(ck, /format/);
  });

  it("geometry mismatch", () => {
    const ck = valid();
    ck.classifier = ck.classifier.slice(0, 5);
    expectLoadError(ck, /classifier/);
  });

  it("ragged head stack", () => {
    const ck = valid();
    ck.wk = ck.wk.slice(0, 2);
    expectLoadError(ck, /wk/);
  });
});

describe("fnv1a", () => {
  it("matches the published reference vectors", () => {
    expect(fnv1a("")).toBe(0x811c9dc5);
    expect(fnv1a("a")).toBe(0xe40c292c);
    expect(fnv1a("foobar")).toBe(0xbf9cf968);
  });
});
