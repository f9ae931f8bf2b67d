// HTTP JSON client for the four service endpoints.

import type {
  AnalyzeResponse,
  ArticleResponse,
  FeedbackKind,
  HealthResponse,
} from "./types";

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ServiceError";
  }
}

async function readDetail(resp: Response): Promise<string> {
  try {
    const body = await resp.json();
    return typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
  } catch {
    return resp.statusText;
  }
}

export class ServiceClient {
  constructor(private baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + "/api/v1" + path;
  }

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    const resp = await fetch(this.url(path), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!resp.ok) {
      throw new ServiceError(resp.status, await readDetail(resp));
    }
    return (await resp.json()) as T;
  }

  analyzeClaim(
    claimText: string,
    options: { pageUrl?: string; aspects?: Record<string, string>; signal?: AbortSignal } = {},
  ): Promise<AnalyzeResponse> {
    return this.post(
      "/analyze/claim",
      { claim_text: claimText, page_url: options.pageUrl, aspects: options.aspects },
      options.signal,
    );
  }

  analyzeArticle(
    source: { articleUrl?: string; articleText?: string },
    claimThreshold: number,
    topK: number,
    signal?: AbortSignal,
  ): Promise<ArticleResponse> {
    return this.post(
      "/analyze/article",
      {
        article_url: source.articleUrl,
        article_text: source.articleText,
        claim_threshold: claimThreshold,
        top_k: topK,
      },
      signal,
    );
  }

  submitFeedback(
    requestId: string,
    kind: FeedbackKind,
    agree: boolean,
    text?: string,
  ): Promise<{ status: string; request_id: string }> {
    return this.post("/feedback", { request_id: requestId, kind, agree, text });
  }

  async health(): Promise<HealthResponse> {
    const resp = await fetch(this.url("/health"));
    if (!resp.ok) {
      throw new ServiceError(resp.status, await readDetail(resp));
    }
    return (await resp.json()) as HealthResponse;
  }
}
