import { defineConfig } from "vite";

export default defineConfig({
  server: {
    port: 5173,
    proxy: {
      "/api": { target: "http://127.0.0.1:8377", changeOrigin: true },
    },
  },
  build: { outDir: "dist" },
  test: {
    environment: "node",
    globalSetup: "./tests/server-setup.ts",
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
