// Shapes of the HTTP API payloads (see docs/api.md in the repo root).

export interface ModelSection {
  dim: number;
  obs_dim: number;
  drift: string[];
  observation: string[];
}

export interface TimeSection {
  total: number;
  dt: number;
  dtau: number;
}

export interface SpaceSection {
  ds: number;
  bounds: "data-driven" | [number, number];
}

export interface InitDensity {
  kind: "gaussian" | "uniform";
  sigma?: number;
}

export interface ExperimentConfig {
  model: ModelSection;
  time: TimeSection;
  space: SpaceSection;
  seed: number;
  x0?: number[] | null;
  init_density?: InitDensity;
  snapshots?: number;
  preset?: string | null;
}

export interface FieldIssue {
  field: string;
  message: string;
}

export interface JobSummary {
  rmse: number;
  zero_estimator_rmse: number;
  timings: Record<string, number>;
  ntau: number;
  grid: { dim: number; ns: number; ds: number };
  snapshot_count: number;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface JobView {
  id: string;
  state: JobState;
  progress: number;
  error: string | null;
  created_at: number;
  completed_at: number | null;
  config: ExperimentConfig;
  summary: JobSummary | null;
}

export interface ResultPayload {
  id: string;
  tau: number[];
  truth: number[][] | null;
  estimates: number[][];
  error: number[] | null;
  rmse: number;
  zero_estimator_rmse: number;
  dim: number;
  config: ExperimentConfig;
}

export interface DensityPayload {
  id: string;
  snapshot: number;
  snapshot_count: number;
  coarse_step: number;
  tau: number;
  axes: number[];
  fixed: Record<string, number>;
  nodes: number[];
  ds: number;
  dim: number;
  values: number[] | number[][];
  mass: number;
}
