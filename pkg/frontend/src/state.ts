// Popup state and the feedback controller.

import type { AnalyzeResponse, ArticleResponse, FeedbackKind } from "./types";

/** The one client capability feedback needs (ServiceClient satisfies it). */
export interface FeedbackSender {
  submitFeedback(
    requestId: string,
    kind: FeedbackKind,
    agree: boolean,
    text?: string,
  ): Promise<unknown>;
}

export type Mode = "marked_text" | "whole_article";

export interface PopupState {
  mode: Mode;
  selection: string;
  pageUrl: string;
  pending: boolean;
  claimThreshold: number; // [0, 1]
  topK: number;
  lastAnalysis: AnalyzeResponse | null;
  lastArticle: ArticleResponse | null;
}

export function initialState(): PopupState {
  return {
    mode: "marked_text",
    selection: "",
    pageUrl: "",
    pending: false,
    claimThreshold: 0.5,
    topK: 5,
    lastAnalysis: null,
    lastArticle: null,
  };
}

/** "Analyze marked text" is actionable only with a non-empty selection. */
export function canAnalyzeMarkedText(state: PopupState): boolean {
  return state.selection.trim().length > 0 && !state.pending;
}

/**
 * Single-flight gate: issuing a new request invalidates the pending one,
 * so a stale response is never rendered.
 */
export class RequestGate {
  private current = 0;

  next(): number {
    return ++this.current;
  }

  isCurrent(token: number): boolean {
    return token === this.current;
  }
}

export type FeedbackOutcome = "recorded" | "duplicate" | "queued";

interface QueuedFeedback {
  requestId: string;
  kind: FeedbackKind;
  agree: boolean;
  text?: string;
}

/**
 * Sends feedback at most once per (request id, kind); a network failure
 * keeps the record locally and retries it exactly once.
 */
export class FeedbackController {
  private sent = new Set<string>();
  private queue: QueuedFeedback[] = [];

  constructor(private client: FeedbackSender) {}

  private key(requestId: string, kind: FeedbackKind): string {
    return `${requestId}:${kind}`;
  }

  hasSent(requestId: string, kind: FeedbackKind): boolean {
    return this.sent.has(this.key(requestId, kind));
  }

  async submit(
    requestId: string,
    kind: FeedbackKind,
    agree: boolean,
    text?: string,
  ): Promise<FeedbackOutcome> {
    const key = this.key(requestId, kind);
    if (this.sent.has(key)) {
      return "duplicate";
    }
    this.sent.add(key); // reserve before the request so double clicks dedup
    try {
      await this.client.submitFeedback(requestId, kind, agree, text);
      return "recorded";
    } catch {
      this.queue.push({ requestId, kind, agree, text });
      return "queued";
    }
  }

  /** Retry everything queued once; records that fail again are dropped. */
  async retryQueued(): Promise<number> {
    const pending = this.queue;
    this.queue = [];
    let recorded = 0;
    for (const item of pending) {
      try {
        await this.client.submitFeedback(item.requestId, item.kind, item.agree, item.text);
        recorded += 1;
      } catch {
        this.sent.delete(this.key(item.requestId, item.kind)); // allow manual resubmit
      }
    }
    return recorded;
  }

  get queuedCount(): number {
    return this.queue.length;
  }
}
