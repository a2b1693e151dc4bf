import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // every test shells out to the CLI; interpreter startup dominates
    testTimeout: 600_000,
    hookTimeout: 600_000,
  },
});
