import assert from "node:assert/strict";
import { test } from "node:test";
import { createSession } from "../src/session.js";
test("trailing slashes are stripped from the server url", () => {
    assert.equal(createSession("http://localhost:8686///", "t-x", "me").baseUrl, "http://localhost:8686");
});
test("empty server or token is rejected", () => {
    assert.throws(() => createSession("", "t-x", "me"));
    assert.throws(() => createSession("http://localhost:1", "", "me"));
});
test("poll interval is clamped to at least one second", () => {
    assert.equal(createSession("http://x", "t", "me", 250).pollIntervalMs, 1000);
    assert.equal(createSession("http://x", "t", "me").pollIntervalMs, 3000);
    assert.equal(createSession("http://x", "t", "me", 5000).pollIntervalMs, 5000);
});
test("handles are normalized to lowercase", () => {
    assert.equal(createSession("http://x", "t", "  Visitor ").handle, "visitor");
});
