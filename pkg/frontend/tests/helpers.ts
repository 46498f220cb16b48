import type { Mode, QueryResponse, ResultItem } from "../src/types.js";

export function makeResult(id: string, distance: number, cls = "smooth"): ResultItem {
  return {
    image_id: id,
    class_label: cls,
    distance,
    combined_key: 90,
    location_cell: 4,
    roi_bbox: [10, 10, 40, 40],
    image_url: `/images/${id}`,
    thumbnail_url: `/images/${id}/thumb`,
    mask_url: `/images/${id}/mask`,
  };
}

export function makeResponse(
  results: ResultItem[],
  overrides: Partial<QueryResponse> = {},
): QueryResponse {
  return {
    mode: "rbir" as Mode,
    k: 10,
    query_key: 90,
    candidates_examined: 25,
    query: {
      source_id: "img_000",
      features: { energy: 0.9, entropy: 0.1, contrast: 0.02 },
      roi_bbox: [10, 10, 40, 40],
      overlay: "data:image/png;base64,AAAA",
    },
    page: 1,
    page_size: 4,
    total_results: results.length,
    total_pages: Math.max(1, Math.ceil(results.length / 4)),
    results,
    ...overrides,
  };
}

export interface FetchCall {
  url: string;
  init?: RequestInit;
}

/** Install a fetch stub that replies from a queue and records every call. */
export function stubFetch(
  replies: { status: number; body: unknown }[],
): { calls: FetchCall[]; restore: () => void } {
  const calls: FetchCall[] = [];
  const original = globalThis.fetch;
  let i = 0;
  globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    calls.push({ url: String(input), init });
    const reply = replies[Math.min(i, replies.length - 1)];
    i += 1;
    return new Response(JSON.stringify(reply.body), {
      status: reply.status,
      headers: { "content-type": "application/json" },
    });
  }) as typeof fetch;
  return { calls, restore: () => (globalThis.fetch = original) };
}
