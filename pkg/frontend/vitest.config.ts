import { defineConfig } from 'vitest/config'

export default defineConfig({
  test: {
    environment: 'happy-dom',
    environmentOptions: {
      happyDOM: {
        // the test server lives on another 127.0.0.1 port
        settings: { fetch: { disableSameOriginPolicy: true } },
      },
    },
    include: ['tests/**/*.test.ts'],
    testTimeout: 120_000,
    hookTimeout: 60_000,
    // campaigns mutate shared live servers; keep files sequential
    fileParallelism: false,
  },
})
