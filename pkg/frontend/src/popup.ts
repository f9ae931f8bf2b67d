// Popup wiring: capture -> analyze -> render -> evidence -> feedback.
//
// All service calls are non-blocking with a visible pending state; at most
// one analyze request is in flight and a newer one cancels the rendering
// of the older (RequestGate).

import { ServiceClient, ServiceError } from "./api";
import { normalizeSelection } from "./highlight";
import { loadServiceUrl } from "./options";
import { claimListView, errorView, evidenceView, resultView } from "./render";
import {
  FeedbackController,
  PopupState,
  RequestGate,
  canAnalyzeMarkedText,
  initialState,
} from "./state";
import type { AnalyzeResponse } from "./types";

const state: PopupState = initialState();
const gate = new RequestGate();
let client: ServiceClient;
let feedback: FeedbackController;

const $ = (id: string) => document.getElementById(id)!;

async function activeTab(): Promise<ChromeTab | null> {
  const tabs = await chrome.tabs.query({ active: true, currentWindow: true });
  return tabs[0] ?? null;
}

async function captureSelection(): Promise<string> {
  const tab = await activeTab();
  state.pageUrl = tab?.url ?? "";
  if (!tab?.id) return "";
  try {
    const reply = await chrome.tabs.sendMessage(tab.id, { type: "GET_SELECTION" });
    return normalizeSelection(reply?.selection ?? "");
  } catch {
    setStatus("This page does not allow script access; copy the claim instead.");
    return "";
  }
}

function setStatus(text: string) {
  $("status").textContent = text;
}

function setPending(pending: boolean) {
  state.pending = pending;
  ($("analyze-selection") as HTMLButtonElement).disabled = !canAnalyzeMarkedText(state);
  ($("analyze-article") as HTMLButtonElement).disabled = pending;
  $("spinner").hidden = !pending;
}

function renderResult(resp: AnalyzeResponse) {
  state.lastAnalysis = resp;
  const view = resultView(resp);
  $("result").hidden = false;
  $("verdict").textContent = view.verdictLabel;
  $("score").textContent = view.scoreText === null ? "" : `credibility ${view.scoreText}`;
  ($("show-evidence") as HTMLButtonElement).disabled = !view.evidenceEnabled;
  $("evidence").hidden = true;
  renderFeedbackButtons();
}

function renderEvidence() {
  if (!state.lastAnalysis) return;
  const container = $("evidence");
  container.innerHTML = "";
  for (const source of evidenceView(state.lastAnalysis)) {
    const block = document.createElement("div");
    block.className = "source";
    const link = document.createElement("a");
    link.href = source.url;
    link.textContent = source.title || source.url;
    link.target = "_blank";
    block.appendChild(link);
    for (const sentence of source.sentences) {
      const span = document.createElement("span");
      span.className = "evidence-sentence";
      span.setAttribute("style", sentence.style);
      span.textContent = sentence.text + " ";
      span.title = `intensity ${sentence.intensity.toFixed(2)}`;
      block.appendChild(span);
    }
    container.appendChild(block);
  }
  container.hidden = false;
}

function renderClaimList() {
  const container = $("claims");
  container.innerHTML = "";
  if (!state.lastArticle) return;
  const rows = claimListView(state.lastArticle.claims, state.claimThreshold, state.topK);
  for (const row of rows) {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.textContent = `${row.scoreText}  ${row.sentence}`;
    button.addEventListener("click", () => void analyzeClaim(row.sentence));
    item.appendChild(button);
    const fb = document.createElement("button");
    fb.textContent = "score wrong";
    fb.className = "claim-feedback";
    fb.addEventListener("click", () => {
      if (state.lastArticle) {
        void feedback.submit(state.lastArticle.request_id, "claim_score", false, row.sentence);
      }
    });
    item.appendChild(fb);
    container.appendChild(item);
  }
  $("claim-list").hidden = rows.length === 0;
}

function renderFeedbackButtons() {
  const resp = state.lastAnalysis;
  const agreeButton = $("agree") as HTMLButtonElement;
  const disagreeButton = $("disagree") as HTMLButtonElement;
  const enabled = !!resp && !feedback.hasSent(resp.request_id, "verdict");
  agreeButton.disabled = disagreeButton.disabled = !enabled;
}

async function submitVerdictFeedback(agree: boolean) {
  const resp = state.lastAnalysis;
  if (!resp) return;
  const outcome = await feedback.submit(resp.request_id, "verdict", agree);
  renderFeedbackButtons();
  if (outcome === "recorded") setStatus("Feedback recorded, thank you.");
  else if (outcome === "queued") {
    setStatus("Offline; feedback queued for retry.");
    setTimeout(() => void feedback.retryQueued(), 2000);
  }
}

function showError(err: unknown) {
  const status = err instanceof ServiceError ? err.status : 0;
  const detail = err instanceof Error ? err.message : String(err);
  const view = errorView(status, detail);
  setStatus(view.message);
  $("retry").hidden = !view.retryable;
}

let lastAction: (() => Promise<void>) | null = null;

async function analyzeClaim(text: string) {
  const token = gate.next();
  setPending(true);
  setStatus("Checking claim ...");
  lastAction = () => analyzeClaim(text);
  try {
    const resp = await client.analyzeClaim(text, { pageUrl: state.pageUrl });
    if (!gate.isCurrent(token)) return; // a newer request superseded this one
    setStatus("");
    renderResult(resp);
  } catch (err) {
    if (gate.isCurrent(token)) showError(err);
  } finally {
    if (gate.isCurrent(token)) setPending(false);
  }
}

async function analyzeWholeArticle() {
  const token = gate.next();
  setPending(true);
  setStatus("Ranking check-worthy sentences ...");
  lastAction = analyzeWholeArticle;
  try {
    const tab = await activeTab();
    const tabId = tab?.id;
    let body: { articleUrl?: string; articleText?: string };
    if (tabId) {
      const reply = await chrome.tabs.sendMessage(tabId, { type: "GET_PAGE_TEXT" });
      body = { articleText: reply?.text || undefined };
    } else {
      body = { articleUrl: state.pageUrl };
    }
    const resp = await client.analyzeArticle(body, state.claimThreshold, state.topK);
    if (!gate.isCurrent(token)) return;
    state.lastArticle = resp;
    setStatus(resp.claims.length ? "" : "No sentence crossed the claim threshold.");
    renderClaimList();
    if (resp.analysis) renderResult(resp.analysis);
  } catch (err) {
    if (gate.isCurrent(token)) showError(err);
  } finally {
    if (gate.isCurrent(token)) setPending(false);
  }
}

async function init() {
  client = new ServiceClient(await loadServiceUrl());
  feedback = new FeedbackController(client);

  state.selection = await captureSelection();
  $("selection-preview").textContent = state.selection
    ? `"${state.selection.slice(0, 140)}"`
    : "No text selected on the page.";
  setPending(false);

  $("analyze-selection").addEventListener("click", () => {
    state.mode = "marked_text";
    void analyzeClaim(state.selection);
  });
  $("analyze-article").addEventListener("click", () => {
    state.mode = "whole_article";
    void analyzeWholeArticle();
  });
  $("show-evidence").addEventListener("click", renderEvidence);
  $("agree").addEventListener("click", () => void submitVerdictFeedback(true));
  $("disagree").addEventListener("click", () => void submitVerdictFeedback(false));
  $("retry").addEventListener("click", () => {
    $("retry").hidden = true;
    if (lastAction) void lastAction();
  });

  const threshold = $("threshold") as HTMLInputElement;
  const topK = $("top-k") as HTMLInputElement;
  threshold.value = String(state.claimThreshold);
  topK.value = String(state.topK);
  threshold.addEventListener("input", () => {
    state.claimThreshold = Number(threshold.value);
    $("threshold-value").textContent = threshold.value;
    renderClaimList(); // client-side re-filter, no new request
  });
  topK.addEventListener("input", () => {
    state.topK = Math.max(1, Number(topK.value) || 1);
    renderClaimList();
  });
}

void init();
