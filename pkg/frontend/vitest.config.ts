import { defineConfig } from "vitest/config";

// the trend suite trains four models end to end, so hooks get a long leash
export default defineConfig({
  test: {
    testTimeout: 120_000,
    hookTimeout: 1_800_000,
  },
});
