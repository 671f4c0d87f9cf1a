/**
 * HTTP transport: three endpoints, JSON in, JSON out.
 *
 *   GET  /v1/meta      -> meta_response
 *   POST /v1/predict   -> predict_response
 *   POST /v1/encode    -> encode_response
 *
 * Status mapping follows the protocol convention: 200 for a normal response,
 * 400 for anything the client got wrong (malformed body, version mismatch,
 * over-length input), 500 for a server-side fault, 404 for unknown paths.
 * Every response body — errors included — is a protocol message.
 *
 * The version check runs before schema validation so a client speaking a
 * different protocol revision hears "version-mismatch", not a field complaint
 * about a shape it never promised to match.
 */
import express from "express";
import type { Application, NextFunction, Request, Response } from "express";
import type { Model, PredictOutput, EncodeOutput } from "./model.js";
import { TruncationError } from "./model.js";
import {
  PROTOCOL_VERSION,
  errorResponse,
  pairRequestSchema,
  statusFor,
  type ErrorResponse,
} from "./protocol.js";

function send(res: Response, body: Record<string, unknown> | ErrorResponse): void {
  res.status(statusFor(body as { error?: ErrorResponse["error"] })).json(body);
}

function handlePair(
  model: Model,
  req: Request,
  res: Response,
  run: (p1: string[], p2: string[]) => PredictOutput | EncodeOutput
): void {
  const body = req.body;
  if (typeof body !== "object" || body === null || Array.isArray(body)) {
    send(res, errorResponse("bad-request", "request body must be a JSON object"));
    return;
  }
  const version = (body as Record<string, unknown>).version;
  if (version !== PROTOCOL_VERSION) {
    send(
      res,
      errorResponse(
        "version-mismatch",
        `server speaks ${JSON.stringify(PROTOCOL_VERSION)}, request carries ${JSON.stringify(version ?? null)}`
      )
    );
    return;
  }
  const parsed = pairRequestSchema.safeParse(body);
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    const where = issue ? `${issue.path.join(".") || "body"}: ${issue.message}` : "invalid request";
    send(res, errorResponse("bad-request", where));
    return;
  }
  try {
    const out = run(parsed.data.part1_tokens, parsed.data.part2_tokens);
    send(res, { version: PROTOCOL_VERSION, ...out });
  } catch (err) {
    if (err instanceof TruncationError) {
      send(res, errorResponse("bad-request", err.message));
    } else {
      send(res, errorResponse("internal", `${(err as Error).name}: ${(err as Error).message}`));
    }
  }
}

export function createApp(model: Model): Application {
  const app = express();
  app.use(express.json());

  app.get("/v1/meta", (_req, res) => {
    send(res, {
      version: PROTOCOL_VERSION,
      model: model.modelName,
      labels: model.labels,
      head_count: model.headCount,
      hidden_size: model.hiddenSize,
      classifier: model.classifier,
    });
  });

  app.post("/v1/predict", (req, res) => {
    handlePair(model, req, res, (p1, p2) => model.predict(p1, p2));
  });

  app.post("/v1/encode", (req, res) => {
    handlePair(model, req, res, (p1, p2) => model.encode(p1, p2));
  });

  app.use((req: Request, res: Response) => {
    res.status(404).json(errorResponse("bad-request", `unknown path ${req.path}`));
  });

  app.use((err: unknown, _req: Request, res: Response, next: NextFunction) => {
    if (res.headersSent) {
      next(err);
      return;
    }
    const parseFailure =
      typeof err === "object" && err !== null && (err as { type?: string }).type === "entity.parse.failed";
    if (parseFailure) {
      res.status(400).json(errorResponse("bad-request", "request body is not valid JSON"));
    } else {
      res
        .status(500)
        .json(errorResponse("internal", `${(err as Error)?.name ?? "Error"}: ${(err as Error)?.message ?? err}`));
    }
  });

  return app;
}
