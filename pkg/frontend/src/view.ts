// Pure projection of workbench state onto display items.
//
// Every numeric display cites the service response field it came from
// (a dot-path into the retained raw responses); the DOM layer renders
// these items verbatim and the audit test resolves each citation.

import type { WorkbenchState } from "./state.js";

export interface DisplayItem {
  id: string;
  text: string;
  value?: number;
  source?: string;
}

export function formatDivergence(value: number): string {
  return value.toFixed(4);
}

export function resolvePath(root: unknown, path: string): unknown {
  let node: unknown = root;
  for (const part of path.split(".")) {
    if (node === null || typeof node !== "object") return undefined;
    const key: string | number = /^\d+$/.test(part) ? Number(part) : part;
    node = (node as Record<string | number, unknown>)[key];
  }
  return node;
}

export function renderDisplay(state: WorkbenchState): DisplayItem[] {
  const items: DisplayItem[] = [];
  items.push({
    id: "baseline-dev",
    text: formatDivergence(state.raw.session.baseline.dev_divergence),
    value: state.raw.session.baseline.dev_divergence,
    source: "session.baseline.dev_divergence",
  });
  items.push({
    id: "baseline-val",
    text: formatDivergence(state.raw.session.baseline.val_divergence),
    value: state.raw.session.baseline.val_divergence,
    source: "session.baseline.val_divergence",
  });
  const refit = state.raw.lastRefit;
  if (refit) {
    items.push({
      id: "current-dev",
      text: formatDivergence(refit.dev_divergence),
      value: refit.dev_divergence,
      source: "lastRefit.dev_divergence",
    });
    items.push({
      id: "current-val",
      text: formatDivergence(refit.val_divergence),
      value: refit.val_divergence,
      source: "lastRefit.val_divergence",
    });
    const delta = refit.val_delta_vs_baseline;
    items.push({
      id: "val-delta",
      text: `${delta >= 0 ? "+" : ""}${formatDivergence(delta)}`,
      value: delta,
      source: "lastRefit.val_delta_vs_baseline",
    });
    if (refit.cache_hit) {
      items.push({ id: "cache-note", text: "cached" });
    }
  }
  for (const [index, char] of state.raw.session.characteristics.entries()) {
    items.push({
      id: `contribution-${char.name}`,
      text: char.contribution.toFixed(3),
      value: char.contribution,
      source: `session.characteristics.${index}.contribution`,
    });
  }
  if (state.suggestion !== null) {
    items.push({ id: "suggestion", text: `next: ${state.suggestion}` });
  }
  const final = state.raw.lastLock?.final;
  if (final) {
    items.push({
      id: "final-val",
      text: formatDivergence(final.val_divergence),
      value: final.val_divergence,
      source: "lastLock.final.val_divergence",
    });
    items.push({
      id: "final-dev",
      text: formatDivergence(final.dev_divergence),
      value: final.dev_divergence,
      source: "lastLock.final.dev_divergence",
    });
  }
  for (const panel of state.panels.values()) {
    items.push({
      id: `detent-${panel.name}`,
      text: state.detents[panel.detentIndex].label,
      value: state.detents[panel.detentIndex].value,
      source: `session.grid.${panel.detentIndex}`,
    });
    if (panel.locked) {
      items.push({ id: `locked-${panel.name}`, text: "locked" });
    }
    if (panel.banner) {
      items.push({ id: `banner-${panel.name}`, text: panel.banner });
    }
  }
  for (const entry of state.locksLog) {
    items.push({
      id: `lock-${entry.characteristic}`,
      text: `${entry.characteristic} locked at ${entry.lambda2}`,
      value: entry.lambda2,
      source: `lastLock.chosen_lambda2.${entry.characteristic}`,
    });
  }
  return items;
}
