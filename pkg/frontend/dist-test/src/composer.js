/** Composer rules: 1-500 characters, counted the way the server counts. */
export const MAX_CHARS = 500;
/** Unicode scalar count, matching the server-side limit exactly. */
export function charCount(text) {
    return [...text].length;
}
export function remaining(text) {
    return MAX_CHARS - charCount(text);
}
export function canSend(text) {
    const n = charCount(text);
    return n >= 1 && n <= MAX_CHARS;
}
