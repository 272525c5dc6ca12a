import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the live test boots the Python service and plays three full games
    testTimeout: 180_000,
    hookTimeout: 120_000,
  },
});
