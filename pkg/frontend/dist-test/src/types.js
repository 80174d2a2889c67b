// Shapes of the HTTP API payloads (see docs/api.md in the repo root).
export {};
