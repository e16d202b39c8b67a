/** Page wiring: login, polling loop, composer, reply targeting.
 *
 * The bearer token lives only in the in-memory session; it is never written
 * into the DOM, and the login input is cleared as soon as the session starts.
 */

import { ApiError, fetchTimeline, submitPost, favouritePost } from "./api.js";
import { canSend, remaining } from "./composer.js";
import { renderTimeline } from "./render.js";
import { createSession, type ClientSession } from "./session.js";

let session: ClientSession | null = null;
let replyTarget: { id: string; handle: string } | null = null;
let pollInFlight = false;
let pollTimer: number | null = null;

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
};

function showError(message: string): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message;
  banner.hidden = false;
}

function clearError(): void {
  el<HTMLDivElement>("error-banner").hidden = true;
}

async function pollOnce(): Promise<void> {
  if (!session || pollInFlight) return; // one in-flight poll at a time
  pollInFlight = true;
  try {
    const statuses = await fetchTimeline(session, 40);
    el<HTMLDivElement>("timeline").innerHTML = renderTimeline(statuses);
    clearError();
  } catch (err) {
    showError(err instanceof ApiError ? `server error ${err.status}: ${err.message}` : String(err));
  } finally {
    pollInFlight = false;
  }
}

function startPolling(): void {
  if (pollTimer !== null) window.clearInterval(pollTimer);
  void pollOnce();
  pollTimer = window.setInterval(() => void pollOnce(), session?.pollIntervalMs);
}

function setReplyTarget(target: { id: string; handle: string } | null): void {
  replyTarget = target;
  const context = el<HTMLDivElement>("reply-context");
  if (target) {
    context.hidden = false;
    el<HTMLSpanElement>("reply-context-handle").textContent = `replying to @${target.handle}`;
  } else {
    context.hidden = true;
  }
}

function refreshComposer(): void {
  const text = el<HTMLTextAreaElement>("composer-text").value;
  const left = remaining(text);
  const counter = el<HTMLSpanElement>("char-counter");
  counter.textContent = String(left);
  counter.classList.toggle("over", left < 0);
  el<HTMLButtonElement>("send-btn").disabled = !canSend(text) || !session;
}

async function handleSend(): Promise<void> {
  if (!session) return;
  const input = el<HTMLTextAreaElement>("composer-text");
  const text = input.value;
  if (!canSend(text)) return;
  try {
    await submitPost(session, text, replyTarget?.id ?? null);
    input.value = "";
    setReplyTarget(null);
    refreshComposer();
    clearError();
    await pollOnce();
  } catch (err) {
    if (err instanceof ApiError) {
      showError(
        err.status === 401
          ? "your token was rejected; check it with the operator"
          : `could not post (${err.status}): ${err.message}`,
      );
    } else {
      showError(String(err));
    }
  }
}

function handleLogin(event: Event): void {
  event.preventDefault();
  const server = el<HTMLInputElement>("login-server").value;
  const token = el<HTMLInputElement>("login-token").value;
  const handle = el<HTMLInputElement>("login-handle").value;
  try {
    session = createSession(server, token, handle);
  } catch (err) {
    showError(String(err));
    return;
  }
  el<HTMLInputElement>("login-token").value = ""; // token never lingers in the DOM
  el<HTMLFormElement>("login-form").hidden = true;
  el<HTMLElement>("room").hidden = false;
  refreshComposer();
  startPolling();
}

function init(): void {
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server");
  const token = params.get("token");
  if (server) el<HTMLInputElement>("login-server").value = server;
  if (params.get("handle")) el<HTMLInputElement>("login-handle").value = params.get("handle")!;

  el<HTMLFormElement>("login-form").addEventListener("submit", handleLogin);
  el<HTMLTextAreaElement>("composer-text").addEventListener("input", refreshComposer);
  el<HTMLButtonElement>("send-btn").addEventListener("click", () => void handleSend());
  el<HTMLButtonElement>("reply-cancel").addEventListener("click", () => setReplyTarget(null));
  el<HTMLDivElement>("timeline").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const replyTo = target.dataset.replyTo;
    if (replyTo) {
      setReplyTarget({ id: replyTo, handle: target.dataset.replyHandle ?? "" });
      el<HTMLTextAreaElement>("composer-text").focus();
    }
    const favourite = target.dataset.favourite;
    if (favourite && session) {
      void favouritePost(session, favourite).then(
        () => void pollOnce(),
        (err) => showError(String(err)),
      );
    }
  });

  if (server && token) {
    // operator can hand out a one-click join link
    session = createSession(server, token, params.get("handle") ?? "");
    el<HTMLFormElement>("login-form").hidden = true;
    el<HTMLElement>("room").hidden = false;
    refreshComposer();
    startPolling();
  }
  refreshComposer();
}

init();
