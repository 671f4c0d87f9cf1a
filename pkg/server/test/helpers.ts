/**
 * Shared test plumbing: spawn the built CLI on an ephemeral port, and a small
 * JSON-over-HTTP client that keeps the raw response text (repeat-determinism
 * checks compare bytes, not parsed values).
 */
import { spawn } from "node:child_process";
import { existsSync } from "node:fs";
import http from "node:http";
import path from "node:path";
import { fileURLToPath } from "node:url";

export const serverDir = path.resolve(fileURLToPath(new URL(".", import.meta.url)), "..");
export const repoRoot = path.resolve(serverDir, "..");
export const checkpointPath = path.join(serverDir, "checkpoint.json");
export const cliPath = path.join(serverDir, "dist", "src", "cli.js");
export const makeCheckpointPath = path.join(serverDir, "dist", "tools", "make_checkpoint.js");

export const METRICS = [
  "aopc_comp",
  "aopc_suff",
  "pha",
  "aopc_comp_per_token",
  "aopc_suff_per_token",
  "pha_per_token",
];

export interface RunningServer {
  baseUrl: string;
  stop(): Promise<void>;
}

export function startServer(extraArgs: string[] = []): Promise<RunningServer> {
  if (!existsSync(cliPath)) {
    throw new Error(`${cliPath} missing — run "npm run build" first`);
  }
  return new Promise((resolve, reject) => {
    const proc = spawn(
      "node",
      [cliPath, "--checkpoint", checkpointPath, "--port", "0", ...extraArgs],
      { stdio: ["ignore", "pipe", "pipe"] }
    );
    let out = "";
    let err = "";
    proc.stderr.on("data", (chunk: Buffer) => {
      err += chunk.toString();
    });
    proc.once("exit", (code) => {
      reject(new Error(`server exited early (code ${code}): ${err || out}`));
    });
    proc.stdout.on("data", (chunk: Buffer) => {
      out += chunk.toString();
      const match = out.match(/listening on (http:\/\/[0-9.]+:\d+)/);
      if (match) {
        resolve({
          baseUrl: match[1],
          stop: () =>
            new Promise<void>((done) => {
              proc.removeAllListeners("exit");
              proc.once("exit", () => done());
              proc.kill("SIGTERM");
              setTimeout(() => proc.kill("SIGKILL"), 2000).unref();
            }),
        });
      }
    });
  });
}

export interface HttpReply {
  status: number;
  text: string;
  json: unknown;
}

export function httpJson(method: string, url: string, body?: unknown): Promise<HttpReply> {
  const payload =
    body === undefined ? undefined : typeof body === "string" ? body : JSON.stringify(body);
  return new Promise((resolve, reject) => {
    const req = http.request(
      url,
      {
        method,
        headers:
          payload === undefined
            ? {}
            : {
                "content-type": "application/json",
                "content-length": Buffer.byteLength(payload),
              },
      },
      (res) => {
        const chunks: Buffer[] = [];
        res.on("data", (c: Buffer) => chunks.push(c));
        res.on("end", () => {
          const text = Buffer.concat(chunks).toString("utf8");
          let json: unknown;
          try {
            json = JSON.parse(text);
          } catch {
            json = undefined;
          }
          resolve({ status: res.statusCode ?? 0, text, json });
        });
      }
    );
    req.on("error", reject);
    if (payload !== undefined) req.write(payload);
    req.end();
  });
}
