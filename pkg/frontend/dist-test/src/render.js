/** Pure HTML rendering for the timeline. Deliberately knows nothing about
 * which accounts are bots — the wire format doesn't say, and neither do we. */
export function escapeHtml(text) {
    return text
        .replaceAll("&", "&amp;")
        .replaceAll("<", "&lt;")
        .replaceAll(">", "&gt;")
        .replaceAll('"', "&quot;")
        .replaceAll("'", "&#39;");
}
export function formatClock(createdAtMs) {
    const totalSeconds = Math.floor(createdAtMs / 1000);
    const minutes = Math.floor(totalSeconds / 60);
    const seconds = totalSeconds % 60;
    return `${String(minutes).padStart(2, "0")}:${String(seconds).padStart(2, "0")}`;
}
function renderStatus(status) {
    return (`<article class="status" data-id="${escapeHtml(status.id)}">` +
        `<header><span class="display-name">${escapeHtml(status.account.display_name)}</span> ` +
        `<span class="handle">@${escapeHtml(status.account.handle)}</span> ` +
        `<time>${formatClock(status.created_at)}</time></header>` +
        `<p class="body">${escapeHtml(status.content)}</p>` +
        `<footer><span class="favs">★ ${status.favourites_count}</span> ` +
        `<button class="reply-btn" data-reply-to="${escapeHtml(status.id)}" ` +
        `data-reply-handle="${escapeHtml(status.account.handle)}">reply</button> ` +
        `<button class="fav-btn" data-favourite="${escapeHtml(status.id)}">★</button></footer>` +
        `</article>`);
}
/** Chronological thread view. Input is newest-first (as the API returns it);
 * output reads oldest to newest, with replies indented under their parents
 * whenever the parent is on the page. */
export function renderTimeline(statuses) {
    if (statuses.length === 0) {
        return '<p class="empty">nothing here yet. say hello!</p>';
    }
    const chronological = [...statuses].reverse();
    const present = new Set(chronological.map((s) => s.id));
    const children = new Map();
    const roots = [];
    for (const status of chronological) {
        if (status.in_reply_to_id !== null && present.has(status.in_reply_to_id)) {
            const siblings = children.get(status.in_reply_to_id) ?? [];
            siblings.push(status);
            children.set(status.in_reply_to_id, siblings);
        }
        else {
            roots.push(status);
        }
    }
    const renderThread = (status) => {
        const replies = children.get(status.id) ?? [];
        const nested = replies.length
            ? `<ul class="replies">${replies.map(renderThread).join("")}</ul>`
            : "";
        return `<li>${renderStatus(status)}${nested}</li>`;
    };
    return `<ul class="thread">${roots.map(renderThread).join("")}</ul>`;
}
export function renderNotifications(notes) {
    if (notes.length === 0) {
        return '<p class="empty">no notifications</p>';
    }
    const described = notes.map((note) => {
        const who = `@${escapeHtml(note.account.handle)}`;
        const what = note.type === "mention"
            ? "mentioned you"
            : note.type === "reply"
                ? "replied to you"
                : note.type === "favourite"
                    ? "favourited your post"
                    : "followed you";
        return `<li class="note note-${note.type}">${who} ${what} <time>${formatClock(note.created_at)}</time></li>`;
    });
    return `<ul class="notes">${described.join("")}</ul>`;
}
