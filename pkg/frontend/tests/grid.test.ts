import { describe, expect, it } from "vitest";

import { buildDetents, detentFor, detentLabel, valueAt } from "../src/grid.js";
import { MOCK_GRID, MockService } from "./mock_service.js";

describe("slider detents", () => {
  it("mirror the service grid exactly, including the zero detent", async () => {
    const session = await new MockService().createSession();
    const detents = buildDetents(session.grid);
    expect(detents.map((d) => d.value)).toEqual(session.grid);
    expect(detents[0].value).toBe(0);
    expect(detents).toHaveLength(session.grid.length);
  });

  it("are a bijection between positions and grid values", () => {
    const detents = buildDetents(MOCK_GRID);
    for (const detent of detents) {
      expect(valueAt(detents, detent.index)).toBe(detent.value);
      expect(detentFor(detents, detent.value).index).toBe(detent.index);
    }
    expect(new Set(detents.map((d) => d.value)).size).toBe(detents.length);
  });

  it("rejects off-grid values and out-of-range positions", () => {
    const detents = buildDetents(MOCK_GRID);
    expect(() => detentFor(detents, 12345)).toThrow(/not on the service grid/);
    expect(() => valueAt(detents, -1)).toThrow(/out of range/);
    expect(() => valueAt(detents, detents.length)).toThrow(/out of range/);
  });

  it("labels half-decade values the way analysts read them", () => {
    expect(detentLabel(0)).toBe("0");
    expect(detentLabel(1)).toBe("1");
    expect(detentLabel(10)).toBe("10");
    expect(detentLabel(10 ** 0.5)).toBe("10^0.5");
    expect(detentLabel(10 ** 7.5)).toBe("10^7.5");
    expect(detentLabel(1e10)).toBe("10^10");
  });
});
