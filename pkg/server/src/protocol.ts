/**
 * Wire protocol message shapes and error envelopes.
 *
 * Field names and constraints mirror the protocol schema shipped with the core
 * package (src/spanex/schemas/oracle_protocol.schema.json): version "1",
 * pair_request in, predict/encode/meta responses out, error responses carrying
 * one of three types. The response schemas are exported so the test suite can
 * validate live server output against the same source of truth the handlers
 * were written from.
 */
import { z } from "zod";

export const PROTOCOL_VERSION = "1";

export const tokensSchema = z.array(z.string().min(1)).min(1);

export const pairRequestSchema = z.object({
  version: z.literal(PROTOCOL_VERSION),
  part1_tokens: tokensSchema,
  part2_tokens: tokensSchema,
});

export type PairRequest = z.infer<typeof pairRequestSchema>;

const probabilitiesSchema = z.array(z.number().min(0).max(1)).min(2);
const matrixSchema = z.array(z.array(z.number()).min(1)).min(1);

export const predictResponseSchema = z.object({
  version: z.literal(PROTOCOL_VERSION),
  probabilities: probabilitiesSchema,
  predicted: z.number().int().min(0),
});

export const encodeResponseSchema = z.object({
  version: z.literal(PROTOCOL_VERSION),
  attention: z.array(matrixSchema).min(1),
  cls: z.array(z.number()).min(2),
  probabilities: probabilitiesSchema,
  predicted: z.number().int().min(0),
  boundary: z.number().int().min(1),
});

export const metaResponseSchema = z.object({
  version: z.literal(PROTOCOL_VERSION),
  model: z.string().min(1),
  labels: z.array(z.string().min(1)).min(2),
  head_count: z.number().int().min(1),
  hidden_size: z.number().int().min(1),
  classifier: matrixSchema,
});

export const ERROR_TYPES = ["bad-request", "version-mismatch", "internal"] as const;
export type ErrorType = (typeof ERROR_TYPES)[number];

export const errorResponseSchema = z.object({
  version: z.literal(PROTOCOL_VERSION),
  error: z.object({
    type: z.enum(ERROR_TYPES),
    message: z.string(),
  }),
});

export interface ErrorResponse {
  version: string;
  error: { type: ErrorType; message: string };
}

export function errorResponse(type: ErrorType, message: string): ErrorResponse {
  return { version: PROTOCOL_VERSION, error: { type, message } };
}

/** HTTP status for a response body: errors are 400s except internal ones. */
export function statusFor(response: { error?: { type: ErrorType } }): number {
  if (!response.error) return 200;
  return response.error.type === "internal" ? 500 : 400;
}
