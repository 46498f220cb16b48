/** Thin client for the query service; all transport errors surface as
 * ServiceError with the service's {error, code} payload attached. */

import type {
  HealthInfo,
  ImageListing,
  Mode,
  QueryResponse,
  ThresholdReport,
} from "./types.js";

export class ServiceError extends Error {
  status: number;
  code: string;
  threshold?: ThresholdReport;

  constructor(status: number, code: string, message: string, threshold?: ThresholdReport) {
    super(message);
    this.status = status;
    this.code = code;
    this.threshold = threshold;
  }
}

async function parseError(res: Response): Promise<never> {
  let code = "error";
  let message = `${res.status} ${res.statusText}`;
  let threshold: ThresholdReport | undefined;
  try {
    const body = await res.json();
    if (body && typeof body === "object") {
      code = body.code ?? code;
      message = body.error ?? message;
      threshold = body.threshold;
    }
  } catch {
    // non-JSON error body: keep the HTTP status text
  }
  throw new ServiceError(res.status, code, message, threshold);
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, init);
    if (!res.ok) {
      await parseError(res);
    }
    return (await res.json()) as T;
  }

  health(): Promise<HealthInfo> {
    return this.request<HealthInfo>("/health");
  }

  listImages(page = 1, pageSize = 50): Promise<ImageListing> {
    return this.request<ImageListing>(`/images?page=${page}&page_size=${pageSize}`);
  }

  imageUrl(id: string): string {
    return `${this.baseUrl}/images/${id}`;
  }

  thumbnailUrl(id: string): string {
    return `${this.baseUrl}/images/${id}/thumb`;
  }

  queryById(
    id: string,
    mode: Mode,
    k: number,
    page: number,
    signal?: AbortSignal,
  ): Promise<QueryResponse> {
    return this.request<QueryResponse>("/query/by-id", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ id, mode, k, page }),
      signal,
    });
  }

  queryUpload(
    file: File | Blob,
    mode: Mode,
    k: number,
    page: number,
    signal?: AbortSignal,
  ): Promise<QueryResponse> {
    const form = new FormData();
    form.append("image", file);
    form.append("mode", mode);
    form.append("k", String(k));
    form.append("page", String(page));
    return this.request<QueryResponse>("/query", { method: "POST", body: form, signal });
  }
}
