/** DOM wiring: everything rendered here is a projection of SessionState
 * through view.ts; result order arrives from the service and is shown
 * untouched. One query is in flight at a time; a re-submit aborts the
 * previous request. */

import { ApiClient, ServiceError } from "./api.js";
import { drawOverlay } from "./overlay.js";
import {
  PAGE_SIZE,
  QuerySource,
  QueryView,
  SessionState,
  canGoBack,
  canGoForward,
  currentView,
  goBack,
  goForward,
  initialState,
  queryFailed,
  queryStarted,
  querySucceeded,
} from "./session.js";
import type { Mode, QueryResponse } from "./types.js";
import { MODES } from "./types.js";
import {
  describeQuery,
  formatDistance,
  highlightedCell,
  pageInfo,
  resultsOnPage,
} from "./view.js";

const api = new ApiClient(
  new URLSearchParams(location.search).get("service") ?? "http://127.0.0.1:8731",
);

let state: SessionState = initialState();
let inFlight: AbortController | null = null;
let pendingUpload: File | null = null;

const el = {
  picker: document.getElementById("picker") as HTMLSelectElement,
  upload: document.getElementById("upload") as HTMLInputElement,
  mode: document.getElementById("mode") as HTMLSelectElement,
  k: document.getElementById("k") as HTMLInputElement,
  submit: document.getElementById("submit") as HTMLButtonElement,
  back: document.getElementById("back") as HTMLButtonElement,
  forward: document.getElementById("forward") as HTMLButtonElement,
  banner: document.getElementById("banner") as HTMLDivElement,
  queryLine: document.getElementById("query-line") as HTMLDivElement,
  canvas: document.getElementById("overlay") as HTMLCanvasElement,
  results: document.getElementById("results") as HTMLDivElement,
  pager: document.getElementById("pager") as HTMLDivElement,
  status: document.getElementById("status") as HTMLDivElement,
};

function setState(next: SessionState): void {
  state = next;
  render();
}

async function runQuery(source: QuerySource, mode: Mode, k: number, page: number): Promise<void> {
  inFlight?.abort();
  const controller = new AbortController();
  inFlight = controller;
  setState(queryStarted(state));
  try {
    let response: QueryResponse;
    if (source.kind === "indexed") {
      response = await api.queryById(source.id, mode, k, page, controller.signal);
    } else {
      if (!pendingUpload) {
        throw new Error("choose a file to upload first");
      }
      response = await api.queryUpload(pendingUpload, mode, k, page, controller.signal);
    }
    const view: QueryView = { source, mode, k, page, response };
    setState(querySucceeded(state, view));
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") {
      return; // superseded by a newer query
    }
    setState(queryFailed(state, err));
  } finally {
    if (inFlight === controller) {
      inFlight = null;
    }
  }
}

function submitFromControls(): void {
  const mode = el.mode.value as Mode;
  const k = Math.max(1, Number(el.k.value) || 10);
  const source: QuerySource = pendingUpload
    ? { kind: "upload", name: pendingUpload.name }
    : { kind: "indexed", id: el.picker.value };
  if (source.kind === "indexed" && !source.id) {
    return;
  }
  void runQuery(source, mode, k, 1);
}

function pivotTo(id: string): void {
  const v = currentView(state);
  pendingUpload = null;
  el.upload.value = "";
  void runQuery({ kind: "indexed", id }, v?.mode ?? (el.mode.value as Mode), v?.k ?? 10, 1);
}

function renderBanner(): void {
  const b = state.banner;
  if (!b) {
    el.banner.hidden = true;
    el.banner.textContent = "";
    return;
  }
  el.banner.hidden = false;
  let text = `${b.kind === "no_region" ? "No region found" : b.kind === "stale_index" ? "Stale index" : "Error"}: ${b.message}`;
  if (b.kind === "no_region" && b.threshold) {
    const t = b.threshold;
    text += ` | thresholds: iterative ${t.t_iterative}, otsu ${t.t_otsu}, T* ${t.t_star} (${t.iterations} iterations)`;
  }
  el.banner.textContent = text;
}

function renderResults(view: QueryView | null): void {
  el.results.replaceChildren();
  el.pager.replaceChildren();
  el.queryLine.textContent = view ? describeQuery(view) : "";
  if (!view) {
    return;
  }

  for (const item of resultsOnPage(view)) {
    const tile = document.createElement("figure");
    tile.className = "tile";
    const img = document.createElement("img");
    img.src = api.thumbnailUrl(item.image_id);
    img.alt = item.image_id;
    img.addEventListener("click", () => pivotTo(item.image_id));
    const caption = document.createElement("figcaption");
    caption.textContent =
      `${item.image_id} (${item.class_label ?? "?"}) d=${formatDistance(item.distance)} ` +
      `key=${item.combined_key} cell=${item.location_cell}`;
    tile.append(img, caption);
    el.results.append(tile);
  }

  const info = pageInfo(view);
  const label = document.createElement("span");
  label.textContent = `page ${info.page}/${info.totalPages} of ${info.totalResults} results`;
  const prev = document.createElement("button");
  prev.textContent = "prev page";
  prev.disabled = info.page <= 1;
  prev.addEventListener("click", () => void runQuery(view.source, view.mode, view.k, view.page - 1));
  const next = document.createElement("button");
  next.textContent = "next page";
  next.disabled = info.page >= info.totalPages;
  next.addEventListener("click", () => void runQuery(view.source, view.mode, view.k, view.page + 1));
  el.pager.append(prev, label, next);
}

function renderOverlay(view: QueryView | null): void {
  const ctx = el.canvas.getContext("2d");
  if (!ctx) {
    return;
  }
  if (!view || !view.response.query.overlay) {
    ctx.clearRect(0, 0, el.canvas.width, el.canvas.height);
    return;
  }
  const image = new Image();
  image.onload = () => {
    el.canvas.width = image.width;
    el.canvas.height = image.height;
    drawOverlay(ctx, image, image.width, image.height, view.response.query.roi_bbox, highlightedCell(view));
  };
  image.src = view.response.query.overlay;
}

function render(): void {
  renderBanner();
  const view = currentView(state);
  renderResults(view);
  renderOverlay(view);
  el.back.disabled = !canGoBack(state);
  el.forward.disabled = !canGoForward(state);
  el.submit.disabled = state.busy;
  el.status.textContent = state.busy ? "querying..." : "";
}

async function boot(): Promise<void> {
  for (const mode of MODES) {
    const opt = document.createElement("option");
    opt.value = mode;
    opt.textContent = mode.toUpperCase();
    el.mode.append(opt);
  }
  el.k.value = "10";
  try {
    const health = await api.health();
    el.status.textContent = `index v${health.index_version}, ${health.entries} images`;
    const listing = await api.listImages(1, 500);
    for (const img of listing.images) {
      const opt = document.createElement("option");
      opt.value = img.id;
      opt.textContent = `${img.id} (${img.class ?? "?"})`;
      el.picker.append(opt);
    }
  } catch (err) {
    setState(queryFailed(state, err));
  }

  el.upload.addEventListener("change", () => {
    pendingUpload = el.upload.files?.[0] ?? null;
  });
  el.picker.addEventListener("change", () => {
    pendingUpload = null;
    el.upload.value = "";
  });
  el.submit.addEventListener("click", submitFromControls);
  el.back.addEventListener("click", () => setState(goBack(state)));
  el.forward.addEventListener("click", () => setState(goForward(state)));
}

void boot();

export { PAGE_SIZE, ServiceError };
