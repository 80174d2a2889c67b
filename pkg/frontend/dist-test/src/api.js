// Thin fetch wrappers over the job API.
export class ApiError extends Error {
    constructor(status, message, issues = []) {
        super(message);
        this.status = status;
        this.issues = issues;
    }
}
async function request(path, init) {
    const response = await fetch(path, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
        throw new ApiError(response.status, body.error ?? `HTTP ${response.status}`, body.issues ?? []);
    }
    return body;
}
export function submitJob(config) {
    return request("/api/jobs", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(config),
    });
}
export function listJobs() {
    return request("/api/jobs");
}
export function jobStatus(id) {
    return request(`/api/jobs/${id}`);
}
export function jobResult(id) {
    return request(`/api/jobs/${id}/result`);
}
export function jobDensity(id, snapshot, axes, fixed) {
    const params = new URLSearchParams({ snapshot: String(snapshot) });
    if (axes)
        params.set("axes", axes);
    if (fixed)
        params.set("fixed", fixed);
    return request(`/api/jobs/${id}/density?${params}`);
}
export function cancelJob(id) {
    return request(`/api/jobs/${id}`, { method: "DELETE" });
}
