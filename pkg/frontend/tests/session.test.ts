import { describe, expect, it } from "vitest";

import { ServiceError } from "../src/api.js";
import {
  PAGE_SIZE,
  QueryView,
  canGoBack,
  canGoForward,
  currentView,
  goBack,
  goForward,
  initialState,
  queryFailed,
  queryStarted,
  querySucceeded,
} from "../src/session.js";
import { makeResponse, makeResult } from "./helpers.js";

function view(id: string, page = 1): QueryView {
  return {
    source: { kind: "indexed", id },
    mode: "rbir",
    k: 10,
    page,
    response: makeResponse([makeResult(id, 0)], { page }),
  };
}

describe("session history", () => {
  it("page size constant matches the service contract", () => {
    expect(PAGE_SIZE).toBe(4);
  });

  it("appends on success and moves the cursor to the newest entry", () => {
    let s = initialState();
    expect(currentView(s)).toBeNull();
    s = querySucceeded(s, view("img_000"));
    s = querySucceeded(s, view("img_001"));
    expect(s.history.map((v) => (v.source.kind === "indexed" ? v.source.id : ""))).toEqual([
      "img_000",
      "img_001",
    ]);
    expect(currentView(s)?.source).toEqual({ kind: "indexed", id: "img_001" });
  });

  it("history is append-only: navigation and new queries never drop entries", () => {
    let s = initialState();
    const first = view("img_000");
    s = querySucceeded(s, first);
    s = querySucceeded(s, view("img_001"));
    s = goBack(s);
    expect(currentView(s)).toBe(first);
    s = querySucceeded(s, view("img_002"));
    expect(s.history).toHaveLength(3);
    expect(s.history[0]).toBe(first); // untouched entries, same objects
    expect(currentView(s)?.source).toEqual({ kind: "indexed", id: "img_002" });
  });

  it("back restores the previous query exactly; forward returns", () => {
    let s = initialState();
    const a = view("img_a", 2);
    const b = view("img_b");
    s = querySucceeded(s, a);
    s = querySucceeded(s, b);
    expect(canGoBack(s)).toBe(true);
    s = goBack(s);
    expect(currentView(s)).toBe(a);
    expect(currentView(s)?.page).toBe(2);
    expect(canGoForward(s)).toBe(true);
    s = goForward(s);
    expect(currentView(s)).toBe(b);
    // hitting the rails is a no-op
    expect(goForward(s)).toBe(s);
    s = goBack(s);
    expect(goBack(s)).toBe(s);
  });

  it("failures set a banner without touching history", () => {
    let s = initialState();
    s = querySucceeded(s, view("img_000"));
    const err = new ServiceError(422, "no_region", "query image has no region", {
      t_iterative: 7,
      t_otsu: 0,
      t_star: 7,
      iterations: 1,
    });
    s = queryFailed(s, err);
    expect(s.history).toHaveLength(1);
    expect(s.banner).toEqual({
      kind: "no_region",
      message: "no region found",
      threshold: { t_iterative: 7, t_otsu: 0, t_star: 7, iterations: 1 },
    });
    // a later success clears the banner
    s = querySucceeded(s, view("img_001"));
    expect(s.banner).toBeNull();
  });

  it("maps 404 to the stale-index banner and others to plain errors", () => {
    let s = queryFailed(initialState(), new ServiceError(404, "not_found", "unknown image id"));
    expect(s.banner?.kind).toBe("stale_index");
    s = queryFailed(initialState(), new ServiceError(500, "internal", "boom"));
    expect(s.banner).toEqual({ kind: "error", message: "boom" });
    s = queryFailed(initialState(), new Error("network down"));
    expect(s.banner).toEqual({ kind: "error", message: "network down" });
  });

  it("busy flag toggles around a query", () => {
    let s = queryStarted(initialState());
    expect(s.busy).toBe(true);
    s = querySucceeded(s, view("img_000"));
    expect(s.busy).toBe(false);
    s = queryFailed(queryStarted(s), new Error("x"));
    expect(s.busy).toBe(false);
  });
});
