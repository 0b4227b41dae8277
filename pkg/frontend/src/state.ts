// Workbench state: panels, greedy lock flow, trace recording, export.
//
// All numbers held here are copied verbatim from service responses; the
// raw responses are kept alongside so the view layer can cite, and tests
// can audit, the provenance of everything on screen.

import { buildDetents, detentFor, type Detent } from "./grid.js";
import type {
  CurveSample,
  Divergences,
  LockResponse,
  RefitResponse,
  SessionCreated,
  TuneReport,
} from "./types.js";

export interface PanelState {
  name: string;
  hasLiquid: boolean;
  pattern: string;
  xscale: string;
  locked: boolean;
  contribution: number;
  detentIndex: number;
  logAxis: boolean;
  curve: CurveSample | null;
  ghostCurve: CurveSample | null;
  banner: string | null;
}

export interface TraceRow {
  lambda2: number;
  val_divergence: number;
}

export interface RawResponses {
  session: SessionCreated;
  lastRefit: RefitResponse | null;
  lastLock: LockResponse | null;
}

export class WorkbenchState {
  sessionId: string;
  detents: Detent[];
  panels: Map<string, PanelState> = new Map();
  baseline: Divergences;
  current: Divergences;
  valDelta: number | null = null;
  cacheHit = false;
  suggestion: string | null;
  final: Divergences | null = null;
  locksLog: { characteristic: string; lambda2: number }[] = [];
  visited: Map<string, TraceRow[]> = new Map();
  raw: RawResponses;

  constructor(created: SessionCreated) {
    this.sessionId = created.session_id;
    this.detents = buildDetents(created.grid);
    this.baseline = created.baseline;
    this.current = created.baseline;
    this.suggestion = created.next_suggestion;
    this.raw = { session: created, lastRefit: null, lastLock: null };
    for (const char of created.characteristics) {
      this.panels.set(char.name, {
        name: char.name,
        hasLiquid: char.has_liquid,
        pattern: char.pattern,
        xscale: char.xscale,
        locked: char.locked,
        contribution: char.contribution,
        detentIndex: char.lambda2 === null ? 0 : detentFor(this.detents, char.lambda2).index,
        logAxis: char.xscale === "log1p",
        curve: null,
        ghostCurve: null,
        banner: null,
      });
    }
  }

  panel(name: string): PanelState {
    const panel = this.panels.get(name);
    if (!panel) throw new Error(`unknown characteristic ${name}`);
    return panel;
  }

  /** Record a slider move before the refit answer arrives. */
  beginSweep(name: string, detentIndex: number): number {
    const panel = this.panel(name);
    if (panel.locked) throw new Error(`${name} is locked`);
    const previous = panel.detentIndex;
    panel.detentIndex = detentIndex;
    panel.banner = null;
    return previous;
  }

  applyRefit(name: string, response: RefitResponse): void {
    const panel = this.panel(name);
    this.raw.lastRefit = response;
    this.current = {
      dev_divergence: response.dev_divergence,
      val_divergence: response.val_divergence,
    };
    this.valDelta = response.val_delta_vs_baseline;
    this.cacheHit = response.cache_hit;
    for (const curve of response.curves) {
      const target = this.panels.get(curve.characteristic);
      if (!target) continue;
      if (curve.characteristic === name) {
        target.ghostCurve = target.curve;
      }
      target.curve = curve;
    }
    const lambda2 = this.detents[panel.detentIndex].value;
    const rows = this.visited.get(name) ?? [];
    rows.push({ lambda2, val_divergence: response.val_divergence });
    this.visited.set(name, rows);
  }

  /** Service rejection: show the banner and restore the previous detent. */
  applyRefitError(name: string, message: string, previousDetent: number): void {
    const panel = this.panel(name);
    panel.banner = message;
    panel.detentIndex = previousDetent;
  }

  applyLock(response: LockResponse): void {
    this.raw.lastLock = response;
    for (const name of response.locked) {
      const panel = this.panels.get(name);
      if (panel) panel.locked = true;
    }
    for (const [name, lambda2] of Object.entries(response.chosen_lambda2)) {
      const panel = this.panels.get(name);
      if (panel && lambda2 !== null) panel.detentIndex = detentFor(this.detents, lambda2).index;
    }
    this.suggestion = response.next_suggestion;
    this.final = response.final;
    const latest = response.locked[response.locked.length - 1];
    const lambda2 = response.chosen_lambda2[latest];
    if (latest !== undefined && lambda2 !== null && lambda2 !== undefined) {
      this.locksLog.push({ characteristic: latest, lambda2 });
    }
  }

  toggleAxis(name: string): void {
    const panel = this.panel(name);
    if (panel.xscale !== "log1p") throw new Error(`${name} has no log axis`);
    panel.logAxis = !panel.logAxis;
  }

  complete(): boolean {
    return this.suggestion === null && this.locksLog.length > 0;
  }

  /** Assemble the session's tuning decisions in the batch report shape. */
  buildExport(): TuneReport {
    const ordering = [...this.panels.values()]
      .sort((a, b) => b.contribution - a.contribution || a.name.localeCompare(b.name))
      .map((p) => ({ name: p.name, contribution: p.contribution }));
    const chosen: Record<string, number | null> = {};
    for (const panel of this.panels.values()) chosen[panel.name] = null;
    for (const lock of this.locksLog) chosen[lock.characteristic] = lock.lambda2;
    const trace = this.locksLog.map((lock) => ({
      characteristic: lock.characteristic,
      grid: (this.visited.get(lock.characteristic) ?? []).map((row) => ({ ...row })),
      chosen: lock.lambda2,
    }));
    const finalVal = this.final ? this.final.val_divergence : this.current.val_divergence;
    return {
      schema_version: 1,
      ordering,
      chosen_lambda2: chosen,
      trace,
      final_val_divergence: finalVal,
      baseline_val_divergence: this.baseline.val_divergence,
    };
  }
}
