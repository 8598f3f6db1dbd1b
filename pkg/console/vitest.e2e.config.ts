import { defineConfig } from "vitest/config";

// End-to-end suite: drives a real registry server (spawned from the Python
// package in this repository) through the same client the UI uses.
export default defineConfig({
  test: {
    environment: "node",
    include: ["tests/e2e/**/*.test.ts"],
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
