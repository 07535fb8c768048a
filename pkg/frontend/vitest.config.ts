import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    globalSetup: ["tests/globalSetup.ts"],
    testTimeout: 20000,
    hookTimeout: 40000,
  },
});
