/** Thin client over the five public endpoints. No privileged channel exists. */

import type { ClientSession } from "./session.js";
import type { NotificationView, StatusView } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function call<T>(
  session: ClientSession,
  method: "GET" | "POST",
  path: string,
  body?: unknown,
): Promise<T> {
  let response: Response;
  try {
    response = await fetch(`${session.baseUrl}${path}`, {
      method,
      headers: {
        Authorization: `Bearer ${session.token}`,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
  } catch (err) {
    throw new ApiError(0, `server unreachable: ${String(err)}`);
  }
  const payload = await response.json().catch(() => null);
  if (!response.ok) {
    const detail =
      payload && typeof payload === "object" && "error" in payload
        ? String((payload as { error: unknown }).error)
        : response.statusText;
    throw new ApiError(response.status, detail);
  }
  return payload as T;
}

export function fetchTimeline(session: ClientSession, limit = 40): Promise<StatusView[]> {
  return call(session, "GET", `/api/v1/timelines/home?limit=${limit}`);
}

export function fetchNotifications(
  session: ClientSession,
  unreadOnly = true,
): Promise<NotificationView[]> {
  return call(session, "GET", `/api/v1/notifications?unread=${unreadOnly}`);
}

export function submitPost(
  session: ClientSession,
  text: string,
  inReplyTo: string | null = null,
): Promise<StatusView> {
  return call(session, "POST", "/api/v1/statuses", {
    status: text,
    in_reply_to_id: inReplyTo,
  });
}

export function favouritePost(session: ClientSession, statusId: string): Promise<StatusView> {
  return call(session, "POST", `/api/v1/statuses/${statusId}/favourite`);
}

export function followAccount(
  session: ClientSession,
  accountId: string,
): Promise<{ id: string; following: boolean }> {
  return call(session, "POST", `/api/v1/accounts/${accountId}/follow`);
}
