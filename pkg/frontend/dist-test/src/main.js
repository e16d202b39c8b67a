/** Page wiring: login, polling loop, composer, reply targeting.
 *
 * The bearer token lives only in the in-memory session; it is never written
 * into the DOM, and the login input is cleared as soon as the session starts.
 */
import { ApiError, fetchTimeline, submitPost, favouritePost } from "./api.js";
import { canSend, remaining } from "./composer.js";
import { renderTimeline } from "./render.js";
import { createSession } from "./session.js";
let session = null;
let replyTarget = null;
let pollInFlight = false;
let pollTimer = null;
const el = (id) => {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing element #${id}`);
    return node;
};
function showError(message) {
    const banner = el("error-banner");
    banner.textContent = message;
    banner.hidden = false;
}
function clearError() {
    el("error-banner").hidden = true;
}
async function pollOnce() {
    if (!session || pollInFlight)
        return; // one in-flight poll at a time
    pollInFlight = true;
    try {
        const statuses = await fetchTimeline(session, 40);
        el("timeline").innerHTML = renderTimeline(statuses);
        clearError();
    }
    catch (err) {
        showError(err instanceof ApiError ? `server error ${err.status}: ${err.message}` : String(err));
    }
    finally {
        pollInFlight = false;
    }
}
function startPolling() {
    if (pollTimer !== null)
        window.clearInterval(pollTimer);
    void pollOnce();
    pollTimer = window.setInterval(() => void pollOnce(), session?.pollIntervalMs);
}
function setReplyTarget(target) {
    replyTarget = target;
    const context = el("reply-context");
    if (target) {
        context.hidden = false;
        el("reply-context-handle").textContent = `replying to @${target.handle}`;
    }
    else {
        context.hidden = true;
    }
}
function refreshComposer() {
    const text = el("composer-text").value;
    const left = remaining(text);
    const counter = el("char-counter");
    counter.textContent = String(left);
    counter.classList.toggle("over", left < 0);
    el("send-btn").disabled = !canSend(text) || !session;
}
async function handleSend() {
    if (!session)
        return;
    const input = el("composer-text");
    const text = input.value;
    if (!canSend(text))
        return;
    try {
        await submitPost(session, text, replyTarget?.id ?? null);
        input.value = "";
        setReplyTarget(null);
        refreshComposer();
        clearError();
        await pollOnce();
    }
    catch (err) {
        if (err instanceof ApiError) {
            showError(err.status === 401
                ? "your token was rejected; check it with the operator"
                : `could not post (${err.status}): ${err.message}`);
        }
        else {
            showError(String(err));
        }
    }
}
function handleLogin(event) {
    event.preventDefault();
    const server = el("login-server").value;
    const token = el("login-token").value;
    const handle = el("login-handle").value;
    try {
        session = createSession(server, token, handle);
    }
    catch (err) {
        showError(String(err));
        return;
    }
    el("login-token").value = ""; // token never lingers in the DOM
    el("login-form").hidden = true;
    el("room").hidden = false;
    refreshComposer();
    startPolling();
}
function init() {
    const params = new URLSearchParams(window.location.search);
    const server = params.get("server");
    const token = params.get("token");
    if (server)
        el("login-server").value = server;
    if (params.get("handle"))
        el("login-handle").value = params.get("handle");
    el("login-form").addEventListener("submit", handleLogin);
    el("composer-text").addEventListener("input", refreshComposer);
    el("send-btn").addEventListener("click", () => void handleSend());
    el("reply-cancel").addEventListener("click", () => setReplyTarget(null));
    el("timeline").addEventListener("click", (event) => {
        const target = event.target;
        const replyTo = target.dataset.replyTo;
        if (replyTo) {
            setReplyTarget({ id: replyTo, handle: target.dataset.replyHandle ?? "" });
            el("composer-text").focus();
        }
        const favourite = target.dataset.favourite;
        if (favourite && session) {
            void favouritePost(session, favourite).then(() => void pollOnce(), (err) => showError(String(err)));
        }
    });
    if (server && token) {
        // operator can hand out a one-click join link
        session = createSession(server, token, params.get("handle") ?? "");
        el("login-form").hidden = true;
        el("room").hidden = false;
        refreshComposer();
        startPolling();
    }
    refreshComposer();
}
init();
