// Thin fetch wrappers over the job API.

import type {
  DensityPayload,
  ExperimentConfig,
  FieldIssue,
  JobView,
  ResultPayload,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  issues: FieldIssue[];

  constructor(status: number, message: string, issues: FieldIssue[] = []) {
    super(message);
    this.status = status;
    this.issues = issues;
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    throw new ApiError(
      response.status,
      (body as { error?: string }).error ?? `HTTP ${response.status}`,
      (body as { issues?: FieldIssue[] }).issues ?? [],
    );
  }
  return body as T;
}

export function submitJob(config: ExperimentConfig): Promise<{ id: string }> {
  return request("/api/jobs", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(config),
  });
}

export function listJobs(): Promise<{ jobs: JobView[] }> {
  return request("/api/jobs");
}

export function jobStatus(id: string): Promise<JobView> {
  return request(`/api/jobs/${id}`);
}

export function jobResult(id: string): Promise<ResultPayload> {
  return request(`/api/jobs/${id}/result`);
}

export function jobDensity(
  id: string,
  snapshot: number,
  axes?: string,
  fixed?: string,
): Promise<DensityPayload> {
  const params = new URLSearchParams({ snapshot: String(snapshot) });
  if (axes) params.set("axes", axes);
  if (fixed) params.set("fixed", fixed);
  return request(`/api/jobs/${id}/density?${params}`);
}

export function cancelJob(id: string): Promise<JobView> {
  return request(`/api/jobs/${id}`, { method: "DELETE" });
}
