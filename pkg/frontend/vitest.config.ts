import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
    globalSetup: "./tests/globalSetup.ts",
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
