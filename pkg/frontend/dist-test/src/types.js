/** Wire shapes returned by the server. Note: nothing here says bot or human. */
export {};
