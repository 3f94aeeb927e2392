import { defineConfig } from "vitest/config";

const API = "http://127.0.0.1:8080";

export default defineConfig({
  build: {
    outDir: "dist",
    emptyOutDir: true,
  },
  server: {
    proxy: Object.fromEntries(
      ["/search", "/categories", "/profile", "/visit", "/health"].map((route) => [route, API]),
    ),
  },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    globalSetup: ["tests/serviceSetup.ts"],
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
