/** Session state: an append-only history of executed query views plus a
 * cursor for back/forward navigation. Every state transition returns a new
 * object; nothing already in the history is ever modified. */

import { ServiceError } from "./api.js";
import type { Mode, QueryResponse, ThresholdReport } from "./types.js";

export const PAGE_SIZE = 4;

export type QuerySource =
  | { kind: "indexed"; id: string }
  | { kind: "upload"; name: string };

/** One executed query round-trip: what was asked, what came back. */
export interface QueryView {
  source: QuerySource;
  mode: Mode;
  k: number;
  page: number;
  response: QueryResponse;
}

export type Banner =
  | { kind: "no_region"; message: string; threshold?: ThresholdReport }
  | { kind: "stale_index"; message: string }
  | { kind: "error"; message: string };

export interface SessionState {
  history: QueryView[];
  cursor: number; // -1 before the first query
  banner: Banner | null;
  busy: boolean;
}

export function initialState(): SessionState {
  return { history: [], cursor: -1, banner: null, busy: false };
}

export function currentView(state: SessionState): QueryView | null {
  return state.cursor >= 0 ? state.history[state.cursor] : null;
}

export function queryStarted(state: SessionState): SessionState {
  return { ...state, busy: true };
}

/** Append the completed view; the cursor always lands on the newest entry. */
export function querySucceeded(state: SessionState, view: QueryView): SessionState {
  const history = [...state.history, view];
  return { history, cursor: history.length - 1, banner: null, busy: false };
}

export function queryFailed(state: SessionState, err: unknown): SessionState {
  return { ...state, banner: bannerFor(err), busy: false };
}

export function bannerFor(err: unknown): Banner {
  if (err instanceof ServiceError) {
    if (err.code === "no_region") {
      return { kind: "no_region", message: "no region found", threshold: err.threshold };
    }
    if (err.status === 404) {
      return {
        kind: "stale_index",
        message: "image is not in the loaded index; reload the listing",
      };
    }
    return { kind: "error", message: err.message };
  }
  return { kind: "error", message: err instanceof Error ? err.message : String(err) };
}

export function canGoBack(state: SessionState): boolean {
  return state.cursor > 0;
}

export function canGoForward(state: SessionState): boolean {
  return state.cursor >= 0 && state.cursor < state.history.length - 1;
}

export function goBack(state: SessionState): SessionState {
  if (!canGoBack(state)) {
    return state;
  }
  return { ...state, cursor: state.cursor - 1, banner: null };
}

export function goForward(state: SessionState): SessionState {
  if (!canGoForward(state)) {
    return state;
  }
  return { ...state, cursor: state.cursor + 1, banner: null };
}
