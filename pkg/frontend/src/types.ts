/** Wire types mirroring the query service's JSON responses. */

export type Mode = "rbir" | "lbir" | "cbir";

export const MODES: Mode[] = ["rbir", "lbir", "cbir"];

export interface FeatureTriple {
  energy: number;
  entropy: number;
  contrast: number;
}

export interface ThresholdReport {
  t_iterative: number;
  t_otsu: number;
  t_star: number;
  iterations: number;
}

export interface ResultItem {
  image_id: string;
  class_label: string | null;
  distance: number;
  combined_key: number;
  location_cell: number;
  roi_bbox: [number, number, number, number];
  image_url: string;
  thumbnail_url: string;
  mask_url: string;
}

export interface QueryInfo {
  source_id: string | null;
  features: FeatureTriple;
  roi_bbox: number[] | null;
  overlay: string | null;
}

export interface QueryResponse {
  mode: Mode;
  k: number;
  query_key: number | null;
  candidates_examined: number;
  query: QueryInfo;
  page: number;
  page_size: number;
  total_results: number;
  total_pages: number;
  results: ResultItem[];
}

export interface ImageListing {
  page: number;
  page_size: number;
  total: number;
  total_pages: number;
  images: { id: string; class: string | null; cell: number; key: number }[];
}

export interface HealthInfo {
  status: string;
  index_version: number;
  entries: number;
}
