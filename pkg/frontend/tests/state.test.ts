import { describe, expect, test } from "vitest";

import {
  FeedbackController,
  type FeedbackSender,
  RequestGate,
  canAnalyzeMarkedText,
  initialState,
} from "../src/state";

class ScriptedSender implements FeedbackSender {
  calls: Array<{ requestId: string; kind: string; agree: boolean; text?: string }> = [];
  failures = 0;

  async submitFeedback(requestId: string, kind: string, agree: boolean, text?: string) {
    if (this.failures > 0) {
      this.failures -= 1;
      throw new Error("offline");
    }
    this.calls.push({ requestId, kind, agree, text });
    return { status: "recorded", request_id: requestId };
  }
}

describe("popup state", () => {
  test("marked-text analysis needs a non-empty selection", () => {
    const state = initialState();
    expect(canAnalyzeMarkedText(state)).toBe(false);
    state.selection = "X causes Y";
    expect(canAnalyzeMarkedText(state)).toBe(true);
    state.pending = true;
    expect(canAnalyzeMarkedText(state)).toBe(false);
  });

  test("defaults match the service defaults", () => {
    const state = initialState();
    expect(state.claimThreshold).toBe(0.5);
    expect(state.topK).toBe(5);
  });
});

describe("RequestGate", () => {
  test("a newer request invalidates the older token", () => {
    const gate = new RequestGate();
    const first = gate.next();
    const second = gate.next();
    expect(gate.isCurrent(first)).toBe(false);
    expect(gate.isCurrent(second)).toBe(true);
  });
});

describe("FeedbackController", () => {
  test("agree click sends exactly one record", async () => {
    const sender = new ScriptedSender();
    const controller = new FeedbackController(sender);
    expect(await controller.submit("req-1", "verdict", true)).toBe("recorded");
    expect(sender.calls).toEqual([
      { requestId: "req-1", kind: "verdict", agree: true, text: undefined },
    ]);
  });

  test("double click dedups to a single record", async () => {
    const sender = new ScriptedSender();
    const controller = new FeedbackController(sender);
    const outcomes = await Promise.all([
      controller.submit("req-1", "verdict", true),
      controller.submit("req-1", "verdict", true),
    ]);
    expect(outcomes.sort()).toEqual(["duplicate", "recorded"]);
    expect(sender.calls).toHaveLength(1);
  });

  test("different kinds for one request id are independent", async () => {
    const sender = new ScriptedSender();
    const controller = new FeedbackController(sender);
    await controller.submit("req-1", "verdict", true);
    await controller.submit("req-1", "claim_score", false);
    expect(sender.calls).toHaveLength(2);
  });

  test("network failure queues then a retry records it once", async () => {
    const sender = new ScriptedSender();
    sender.failures = 1;
    const controller = new FeedbackController(sender);
    expect(await controller.submit("req-2", "verdict", false)).toBe("queued");
    expect(controller.queuedCount).toBe(1);
    expect(await controller.retryQueued()).toBe(1);
    expect(sender.calls).toHaveLength(1);
    expect(controller.queuedCount).toBe(0);
    // still deduped after the successful retry
    expect(await controller.submit("req-2", "verdict", false)).toBe("duplicate");
  });

  test("a retry that fails again frees the slot for manual resubmission", async () => {
    const sender = new ScriptedSender();
    sender.failures = 2;
    const controller = new FeedbackController(sender);
    await controller.submit("req-3", "verdict", true);
    expect(await controller.retryQueued()).toBe(0);
    expect(controller.hasSent("req-3", "verdict")).toBe(false);
    expect(await controller.submit("req-3", "verdict", true)).toBe("recorded");
  });
});
