/** Composer rules: 1-500 characters, counted the way the server counts. */

export const MAX_CHARS = 500;

/** Unicode scalar count, matching the server-side limit exactly. */
export function charCount(text: string): number {
  return [...text].length;
}

export function remaining(text: string): number {
  return MAX_CHARS - charCount(text);
}

export function canSend(text: string): boolean {
  const n = charCount(text);
  return n >= 1 && n <= MAX_CHARS;
}
