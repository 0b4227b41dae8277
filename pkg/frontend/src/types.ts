// Service wire types and the export-report schema.
//
// Every number the workbench displays originates in one of these response
// shapes; the UI layer carries values through untouched.

import { z } from "zod";

export interface Divergences {
  dev_divergence: number;
  val_divergence: number;
}

export interface CharacteristicState {
  name: string;
  has_liquid: boolean;
  pattern: string;
  xscale: string;
  lambda2: number | null;
  locked: boolean;
  contribution: number;
}

export interface SessionCreated {
  session_id: string;
  baseline: Divergences;
  grid: number[];
  characteristics: CharacteristicState[];
  next_suggestion: string | null;
}

export interface CurveSample {
  characteristic: string;
  lambda2: number;
  xs: number[];
  xs_log1p: number[] | null;
  cs: number[];
  dev_divergence: number;
  val_divergence: number;
}

export interface RefitResponse {
  dev_divergence: number;
  val_divergence: number;
  val_delta_vs_baseline: number;
  cache_hit: boolean;
  curves: CurveSample[];
}

export interface LockResponse {
  locked: string[];
  chosen_lambda2: Record<string, number | null>;
  next_suggestion: string | null;
  final: Divergences | null;
}

export interface ServiceErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}

// The exported tuning report mirrors the batch tool's report document.
export const tuneReportSchema = z.object({
  schema_version: z.literal(1),
  ordering: z.array(z.object({ name: z.string(), contribution: z.number() })),
  chosen_lambda2: z.record(z.string(), z.number().nullable()),
  trace: z.array(
    z.object({
      characteristic: z.string(),
      grid: z.array(z.object({ lambda2: z.number(), val_divergence: z.number() })),
      chosen: z.number(),
    }),
  ),
  final_val_divergence: z.number(),
  baseline_val_divergence: z.number(),
});

export type TuneReport = z.infer<typeof tuneReportSchema>;
