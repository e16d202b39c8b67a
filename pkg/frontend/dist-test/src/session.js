/** Participant session: provisioned by the operator, held in memory only. */
export const MIN_POLL_INTERVAL_MS = 1000;
export const DEFAULT_POLL_INTERVAL_MS = 3000;
export function createSession(baseUrl, token, handle, pollIntervalMs = DEFAULT_POLL_INTERVAL_MS) {
    const trimmed = baseUrl.replace(/\/+$/, "");
    if (!trimmed)
        throw new Error("server URL is required");
    if (!token)
        throw new Error("session token is required");
    return {
        baseUrl: trimmed,
        token,
        handle: handle.trim().toLowerCase(),
        pollIntervalMs: Math.max(MIN_POLL_INTERVAL_MS, pollIntervalMs),
    };
}
