/** Pure projections from state to what the DOM shows. The service decides
 * result order; nothing here may reorder it. */

import type { QueryView } from "./session.js";
import type { ResultItem } from "./types.js";

/** The four tiles for the current page, exactly as the service sent them. */
export function resultsOnPage(view: QueryView): ResultItem[] {
  return view.response.results;
}

export interface PageInfo {
  page: number;
  totalPages: number;
  totalResults: number;
  pageSize: number;
}

export function pageInfo(view: QueryView): PageInfo {
  const r = view.response;
  return {
    page: r.page,
    totalPages: r.total_pages,
    totalResults: r.total_results,
    pageSize: r.page_size,
  };
}

export function formatDistance(d: number): string {
  return d.toFixed(4);
}

/** Grid cell to highlight: only meaningful in location mode. */
export function highlightedCell(view: QueryView): number | null {
  return view.mode === "lbir" ? view.response.query_key : null;
}

export function describeQuery(view: QueryView): string {
  const src = view.source.kind === "indexed" ? view.source.id : view.source.name;
  const key = view.response.query_key;
  const bucket = key === null ? "full scan" : `bucket ${key}`;
  return `${src} | ${view.mode} k=${view.k} | ${bucket} | ${view.response.candidates_examined} candidates`;
}
