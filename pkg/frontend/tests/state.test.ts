import { describe, expect, it } from "vitest";

import { ServiceError } from "../src/api.js";
import { WorkbenchState } from "../src/state.js";
import { MOCK_GRID, MockService } from "./mock_service.js";

async function sweepTo(state: WorkbenchState, service: MockService, name: string, index: number) {
  const previous = state.beginSweep(name, index);
  try {
    const response = await service.refit(state.sessionId, { lambda2: { [name]: MOCK_GRID[index] } });
    state.applyRefit(name, response);
  } catch (err) {
    const message = err instanceof ServiceError ? err.body.message : String(err);
    state.applyRefitError(name, message, previous);
  }
}

describe("workbench lock flow", () => {
  it("completes a full greedy pass over a three-characteristic session", async () => {
    const service = new MockService();
    const state = new WorkbenchState(await service.createSession());

    expect(state.suggestion).toBe("alpha");
    expect([...state.panels.keys()]).toEqual(["alpha", "beta", "gamma"]);
    expect(state.panel("gamma").hasLiquid).toBe(false);

    // sweep the first suggestion across a few detents, then lock the best
    let best = { index: 0, val: -Infinity };
    for (const index of [0, 6, 10, 14]) {
      await sweepTo(state, service, "alpha", index);
      expect(state.cacheHit).toBe(false);
      if (state.current.val_divergence > best.val) {
        best = { index, val: state.current.val_divergence };
      }
    }
    expect(best.index).toBe(10); // the mock's planted optimum at 1e5

    await sweepTo(state, service, "alpha", best.index); // revisiting: cache hit
    expect(state.cacheHit).toBe(true);

    state.applyLock(await service.lock(state.sessionId, "alpha", MOCK_GRID[best.index]));
    expect(state.panel("alpha").locked).toBe(true);
    expect(state.suggestion).toBe("beta");
    expect(state.final).toBeNull();

    // locked panels reject further sweeps locally and remotely
    expect(() => state.beginSweep("alpha", 2)).toThrow(/locked/);
    await expect(service.refit("mock-session", { lambda2: { alpha: 0 } })).rejects.toMatchObject({
      status: 409,
    });

    // second characteristic, then completion
    await sweepTo(state, service, "beta", 4);
    state.applyLock(await service.lock(state.sessionId, "beta", MOCK_GRID[4]));
    expect(state.suggestion).toBeNull();
    expect(state.final).not.toBeNull();
    expect(state.complete()).toBe(true);
    expect(state.locksLog).toEqual([
      { characteristic: "alpha", lambda2: MOCK_GRID[10] },
      { characteristic: "beta", lambda2: MOCK_GRID[4] },
    ]);
    // final value matches the mock's divergence at the locked state
    expect(state.final!.val_divergence).toBeCloseTo(state.current.val_divergence, 12);
  });

  it("ghosts the previous curve when a panel is re-swept", async () => {
    const service = new MockService();
    const state = new WorkbenchState(await service.createSession());
    await sweepTo(state, service, "alpha", 2);
    const first = state.panel("alpha").curve;
    expect(first).not.toBeNull();
    await sweepTo(state, service, "alpha", 8);
    expect(state.panel("alpha").ghostCurve).toBe(first);
    expect(state.panel("alpha").curve!.lambda2).toBe(MOCK_GRID[8]);
  });

  it("rolls the slider back when the service rejects a sweep", async () => {
    const service = new MockService();
    const state = new WorkbenchState(await service.createSession());
    await sweepTo(state, service, "alpha", 5);
    expect(state.panel("alpha").detentIndex).toBe(5);

    service.locked.push("alpha"); // lock behind the UI's back: next sweep races
    await sweepTo(state, service, "alpha", 9);
    expect(state.panel("alpha").detentIndex).toBe(5);
    expect(state.panel("alpha").banner).toMatch(/locked/);
  });

  it("toggling the x axis re-plots the same scores against log1p(x)", async () => {
    const service = new MockService();
    const state = new WorkbenchState(await service.createSession());
    await sweepTo(state, service, "alpha", 3);
    const curve = state.panel("alpha").curve!;
    expect(state.panel("alpha").logAxis).toBe(true); // log-scaled by spec
    state.toggleAxis("alpha");
    expect(state.panel("alpha").logAxis).toBe(false);
    // the curve itself is untouched by the toggle
    expect(state.panel("alpha").curve).toBe(curve);
    expect(() => state.toggleAxis("beta")).toThrow(/no log axis/);
  });
});
