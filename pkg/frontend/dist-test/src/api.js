/** Thin client over the five public endpoints. No privileged channel exists. */
export class ApiError extends Error {
    status;
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
async function call(session, method, path, body) {
    let response;
    try {
        response = await fetch(`${session.baseUrl}${path}`, {
            method,
            headers: {
                Authorization: `Bearer ${session.token}`,
                ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
            },
            body: body !== undefined ? JSON.stringify(body) : undefined,
        });
    }
    catch (err) {
        throw new ApiError(0, `server unreachable: ${String(err)}`);
    }
    const payload = await response.json().catch(() => null);
    if (!response.ok) {
        const detail = payload && typeof payload === "object" && "error" in payload
            ? String(payload.error)
            : response.statusText;
        throw new ApiError(response.status, detail);
    }
    return payload;
}
export function fetchTimeline(session, limit = 40) {
    return call(session, "GET", `/api/v1/timelines/home?limit=${limit}`);
}
export function fetchNotifications(session, unreadOnly = true) {
    return call(session, "GET", `/api/v1/notifications?unread=${unreadOnly}`);
}
export function submitPost(session, text, inReplyTo = null) {
    return call(session, "POST", "/api/v1/statuses", {
        status: text,
        in_reply_to_id: inReplyTo,
    });
}
export function favouritePost(session, statusId) {
    return call(session, "POST", `/api/v1/statuses/${statusId}/favourite`);
}
export function followAccount(session, accountId) {
    return call(session, "POST", `/api/v1/accounts/${accountId}/follow`);
}
