import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    testTimeout: 120_000,
    hookTimeout: 60_000,
    // Server-spawning files run one at a time; keeps ports and the python
    // cross-checks from competing for the box.
    fileParallelism: false,
  },
});
