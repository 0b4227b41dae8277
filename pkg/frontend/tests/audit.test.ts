// Mock-service audit: the UI never computes math. Every numeric display
// item must cite a service response field whose value it equals.

import { describe, expect, it } from "vitest";

import { WorkbenchState } from "../src/state.js";
import { renderDisplay, resolvePath } from "../src/view.js";
import { MOCK_GRID, MockService } from "./mock_service.js";

async function sessionWithActivity(): Promise<WorkbenchState> {
  const service = new MockService();
  const state = new WorkbenchState(await service.createSession());
  state.beginSweep("alpha", 10);
  state.applyRefit("alpha", await service.refit(state.sessionId, { lambda2: { alpha: MOCK_GRID[10] } }));
  state.applyLock(await service.lock(state.sessionId, "alpha", MOCK_GRID[10]));
  state.beginSweep("beta", 4);
  state.applyRefit("beta", await service.refit(state.sessionId, { lambda2: { beta: MOCK_GRID[4] } }));
  state.applyLock(await service.lock(state.sessionId, "beta", MOCK_GRID[4]));
  return state;
}

describe("display provenance audit", () => {
  it("every numeric display item equals the service field it cites", async () => {
    const state = await sessionWithActivity();
    const items = renderDisplay(state);
    const numeric = items.filter((item) => item.value !== undefined);
    expect(numeric.length).toBeGreaterThanOrEqual(10);
    for (const item of numeric) {
      expect(item.source, `item ${item.id} must cite a service field`).toBeDefined();
      const resolved = resolvePath(state.raw, item.source!);
      expect(resolved, `item ${item.id} cites ${item.source}`).toBe(item.value);
    }
  });

  it("no display item carries digits without a provenance-tracked value", async () => {
    const state = await sessionWithActivity();
    for (const item of renderDisplay(state)) {
      const hasDigits = /\d/.test(item.text.replace(/^next: /, "").replace(/locked|cached/g, ""));
      if (hasDigits && item.value === undefined) {
        throw new Error(`display item ${item.id} shows '${item.text}' without provenance`);
      }
    }
  });

  it("readouts track the latest refit exactly", async () => {
    const state = await sessionWithActivity();
    const items = new Map(renderDisplay(state).map((item) => [item.id, item]));
    expect(items.get("current-val")!.value).toBe(state.raw.lastRefit!.val_divergence);
    expect(items.get("val-delta")!.value).toBe(state.raw.lastRefit!.val_delta_vs_baseline);
    expect(items.get("baseline-val")!.value).toBe(state.raw.session.baseline.val_divergence);
    // the signed delta renders with its sign
    const delta = items.get("val-delta")!;
    expect(delta.text.startsWith("+") || delta.text.startsWith("-")).toBe(true);
  });
});
