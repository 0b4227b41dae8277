import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { RefitScheduler } from "../src/api.js";
import type { ServiceClient } from "../src/api.js";
import type { LockResponse, RefitResponse, SessionCreated } from "../src/types.js";

class RecordingClient implements ServiceClient {
  calls: { overrides: unknown; signal?: AbortSignal }[] = [];
  resolvers: ((r: RefitResponse) => void)[] = [];

  createSession(): Promise<SessionCreated> {
    throw new Error("unused");
  }

  refit(
    _sessionId: string,
    overrides: { lambda2?: Record<string, number> },
    signal?: AbortSignal,
  ): Promise<RefitResponse> {
    this.calls.push({ overrides, signal });
    return new Promise((resolve) => this.resolvers.push(resolve));
  }

  lock(): Promise<LockResponse> {
    throw new Error("unused");
  }
}

const fakeResponse = (val: number): RefitResponse => ({
  dev_divergence: val + 0.05,
  val_divergence: val,
  val_delta_vs_baseline: 0,
  cache_hit: false,
  curves: [],
});

describe("refit scheduling", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("debounces rapid slider moves into one request", () => {
    const client = new RecordingClient();
    const scheduler = new RefitScheduler(client, "s", 150);
    const results: number[] = [];
    for (const value of [1, 10, 100]) {
      scheduler.schedule("alpha", { lambda2: { alpha: value } }, (r) => results.push(r.val_divergence), () => {});
      vi.advanceTimersByTime(50);
    }
    expect(client.calls).toHaveLength(0);
    vi.advanceTimersByTime(200);
    expect(client.calls).toHaveLength(1);
    expect(client.calls[0].overrides).toEqual({ lambda2: { alpha: 100 } });
  });

  it("aborts a superseded in-flight request and drops its result", async () => {
    const client = new RecordingClient();
    const scheduler = new RefitScheduler(client, "s", 10);
    const results: number[] = [];

    scheduler.schedule("alpha", { lambda2: { alpha: 1 } }, (r) => results.push(r.val_divergence), () => {});
    vi.advanceTimersByTime(20);
    expect(client.calls).toHaveLength(1);

    scheduler.schedule("alpha", { lambda2: { alpha: 31.6 } }, (r) => results.push(r.val_divergence), () => {});
    vi.advanceTimersByTime(20);
    expect(client.calls).toHaveLength(2);
    expect(client.calls[0].signal!.aborted).toBe(true);
    expect(client.calls[1].signal!.aborted).toBe(false);

    // the stale response arrives late and is ignored; the live one lands
    client.resolvers[0](fakeResponse(0.1));
    client.resolvers[1](fakeResponse(0.2));
    await vi.runAllTimersAsync();
    expect(results).toEqual([0.2]);
  });

  it("panels schedule independently", () => {
    const client = new RecordingClient();
    const scheduler = new RefitScheduler(client, "s", 10);
    scheduler.schedule("alpha", { lambda2: { alpha: 1 } }, () => {}, () => {});
    scheduler.schedule("beta", { lambda2: { beta: 10 } }, () => {}, () => {});
    vi.advanceTimersByTime(20);
    expect(client.calls).toHaveLength(2);
    expect(client.calls[0].signal!.aborted).toBe(false);
    expect(client.calls[1].signal!.aborted).toBe(false);
  });
});
