/**
 * Hand-rolled ambient declarations for the two runtime dependencies that ship
 * without their own type definitions. Deliberately narrow: only the slice of
 * each API this package actually touches, so the compiler still catches typos
 * without us vendoring the full community typings.
 */

declare module "express" {
  import type { IncomingMessage, Server, ServerResponse } from "node:http";

  export interface Request extends IncomingMessage {
    body: unknown;
    path: string;
  }

  export interface Response extends ServerResponse {
    status(code: number): Response;
    json(body: unknown): Response;
  }

  export type NextFunction = (err?: unknown) => void;
  export type Handler = (req: Request, res: Response, next: NextFunction) => void;
  export type ErrorHandler = (
    err: unknown,
    req: Request,
    res: Response,
    next: NextFunction
  ) => void;

  export interface Application {
    use(handler: Handler | ErrorHandler): Application;
    get(path: string, handler: Handler): Application;
    post(path: string, handler: Handler): Application;
    listen(port: number, host: string, callback?: () => void): Server;
    listen(port: number, callback?: () => void): Server;
  }

  interface ExpressFactory {
    (): Application;
    json(options?: { limit?: string | number }): Handler;
  }

  const express: ExpressFactory;
  export default express;
}

declare module "yargs" {
  export interface Argv {
    scriptName(name: string): Argv;
    usage(message: string): Argv;
    option(key: string, spec: Record<string, unknown>): Argv;
    strict(): Argv;
    version(v: string): Argv;
    help(): Argv;
    parseSync(): Record<string, unknown>;
  }
  function yargs(argv: string[]): Argv;
  export default yargs;
}

declare module "yargs/helpers" {
  export function hideBin(argv: string[]): string[];
}
