/** Wire shapes returned by the server. Note: nothing here says bot or human. */

export interface AccountRef {
  id: string;
  handle: string;
  display_name: string;
}

export interface StatusView {
  id: string;
  account: AccountRef;
  content: string;
  created_at: number;
  in_reply_to_id: string | null;
  mentions: { id: string; handle: string }[];
  favourites_count: number;
}

export interface NotificationView {
  id: string;
  type: "mention" | "reply" | "favourite" | "follow";
  account: AccountRef;
  status: StatusView | null;
  created_at: number;
}
