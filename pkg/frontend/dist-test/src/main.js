// DOM wiring: run form, job list with polling, trajectory chart, density view.
import { ApiError, cancelJob, jobDensity, jobResult, jobStatus, listJobs, submitJob } from "./api.js";
import { ESTIMATE_COLOR, TRUTH_COLOR, axisTicks, decimate, extentOf, linearScale, polylinePoints, } from "./charts.js";
import { colorScale, sliceRange } from "./color.js";
import { resultToCsv } from "./csv.js";
import { fixedSpec, midIndex, sliceLabel } from "./density.js";
import { initialPollState, nextPollDelayMs, onPollFailure, onPollSuccess } from "./poll.js";
import { PRESETS } from "./presets.js";
import { configToForm, defaultForm, formToConfig, resizeExpressions, validateForm, } from "./validate.js";
const $ = (id) => {
    const el = document.getElementById(id);
    if (!el)
        throw new Error(`missing element #${id}`);
    return el;
};
let form = defaultForm();
const pollers = new Map();
let selectedJob = null;
let currentResult = null;
let currentDim = 0;
let showTruth = true;
let snapshotIndex = 0;
let snapshotCount = 0;
// ---- form rendering --------------------------------------------------------
function renderExpressionInputs() {
    const driftBox = $("drift-inputs");
    const obsBox = $("obs-inputs");
    driftBox.innerHTML = "";
    obsBox.innerHTML = "";
    form.driftTexts.forEach((text, i) => {
        driftBox.appendChild(expressionRow(`f${i + 1}(x)`, text, `drift[${i}]`, (v) => {
            form.driftTexts[i] = v;
        }));
    });
    form.obsTexts.forEach((text, i) => {
        obsBox.appendChild(expressionRow(`h${i + 1}(x)`, text, `observation[${i}]`, (v) => {
            form.obsTexts[i] = v;
        }));
    });
}
function expressionRow(label, value, field, onChange) {
    const row = document.createElement("div");
    row.className = "expr-row";
    const span = document.createElement("label");
    span.textContent = label;
    const input = document.createElement("input");
    input.type = "text";
    input.value = value;
    input.spellcheck = false;
    input.dataset.field = field;
    input.addEventListener("input", () => {
        onChange(input.value);
        refreshValidation();
    });
    const err = document.createElement("div");
    err.className = "field-error";
    err.dataset.errorFor = field;
    row.append(span, input, err);
    return row;
}
function syncFormInputs() {
    $("dim").value = String(form.dim);
    $("obs-dim").value = String(form.obsDim);
    $("total").value = String(form.total);
    $("dt").value = String(form.dt);
    $("dtau").value = String(form.dtau);
    $("ds").value = String(form.ds);
    $("bounds-mode").value = form.boundsMode;
    $("lo").value = String(form.lo);
    $("hi").value = String(form.hi);
    $("seed").value = String(form.seed);
    $("init-kind").value = form.initKind;
    $("init-sigma").value = String(form.initSigma);
    $("fixed-bounds").style.display = form.boundsMode === "fixed" ? "" : "none";
    $("sigma-row").style.display = form.initKind === "gaussian" ? "" : "none";
    renderExpressionInputs();
    refreshValidation();
}
function clearFieldErrors() {
    document.querySelectorAll(".field-error").forEach((el) => {
        el.textContent = "";
    });
}
function showFieldError(field, message) {
    // server fields look like model.drift[0]; local ones like drift[0]
    const key = field.replace(/^model\./, "");
    const el = document.querySelector(`[data-error-for="${key}"]`);
    if (el) {
        el.textContent = message;
        return true;
    }
    return false;
}
function refreshValidation() {
    clearFieldErrors();
    const issues = validateForm(form);
    const unplaced = [];
    for (const issue of issues) {
        if (!showFieldError(issue.field, issue.message)) {
            unplaced.push(`${issue.field}: ${issue.message}`);
        }
    }
    const banner = $("form-message");
    banner.textContent = unplaced.join("; ");
    $("submit").disabled = issues.length > 0;
}
function readNumber(id) {
    return Number($(id).value);
}
function bindForm() {
    $("dim").addEventListener("input", () => {
        const dim = readNumber("dim");
        if (Number.isInteger(dim) && dim >= 1 && dim <= 6) {
            form.dim = dim;
            form.driftTexts = resizeExpressions(form.driftTexts, dim, "0");
        }
        syncFormInputs();
    });
    $("obs-dim").addEventListener("input", () => {
        const m = readNumber("obs-dim");
        if (Number.isInteger(m) && m >= 1 && m <= 6) {
            form.obsDim = m;
            form.obsTexts = resizeExpressions(form.obsTexts, m, "x1");
        }
        syncFormInputs();
    });
    const numeric = [
        ["total", (v) => (form.total = v)],
        ["dt", (v) => (form.dt = v)],
        ["dtau", (v) => (form.dtau = v)],
        ["ds", (v) => (form.ds = v)],
        ["lo", (v) => (form.lo = v)],
        ["hi", (v) => (form.hi = v)],
        ["seed", (v) => (form.seed = v)],
        ["init-sigma", (v) => (form.initSigma = v)],
    ];
    for (const [id, setter] of numeric) {
        $(id).addEventListener("input", () => {
            setter(readNumber(id));
            refreshValidation();
        });
    }
    $("bounds-mode").addEventListener("change", () => {
        form.boundsMode = $("bounds-mode").value;
        syncFormInputs();
    });
    $("init-kind").addEventListener("change", () => {
        form.initKind = $("init-kind").value;
        syncFormInputs();
    });
    const presetBox = $("preset-buttons");
    for (const name of Object.keys(PRESETS)) {
        const btn = document.createElement("button");
        btn.type = "button";
        btn.textContent = name;
        btn.addEventListener("click", () => {
            form = configToForm(PRESETS[name]);
            syncFormInputs();
        });
        presetBox.appendChild(btn);
    }
    $("submit").addEventListener("click", async () => {
        clearFieldErrors();
        $("form-message").textContent = "";
        try {
            const { id } = await submitJob(formToConfig(form));
            startPolling(id);
            selectedJob = id;
            await refreshJobList();
        }
        catch (err) {
            if (err instanceof ApiError) {
                const unplaced = [];
                for (const issue of err.issues) {
                    if (!showFieldError(issue.field, issue.message)) {
                        unplaced.push(`${issue.field}: ${issue.message}`);
                    }
                }
                $("form-message").textContent =
                    unplaced.length > 0 ? unplaced.join("; ") : err.message;
            }
            else {
                $("form-message").textContent = `submit failed: ${String(err)}; server unreachable?`;
            }
        }
    });
}
// ---- job list and polling ---------------------------------------------------
function startPolling(jobId) {
    if (pollers.has(jobId))
        return;
    pollers.set(jobId, initialPollState(jobId));
    void pollLoop(jobId);
}
async function pollLoop(jobId) {
    for (;;) {
        let state = pollers.get(jobId);
        if (!state)
            return;
        try {
            const view = await jobStatus(jobId);
            state = onPollSuccess(state, view);
            pollers.set(jobId, state);
            updateJobRow(view, state);
            if (!state.active) {
                if (view.state === "done" && selectedJob === jobId) {
                    await loadResult(jobId);
                }
                return;
            }
        }
        catch (err) {
            if (err instanceof ApiError && err.status === 404) {
                pollers.delete(jobId);
                return;
            }
            state = onPollFailure(state, err instanceof Error ? err.message : String(err));
            pollers.set(jobId, state);
            updateConnectionBanner(state);
        }
        await sleep(nextPollDelayMs(state));
    }
}
function sleep(ms) {
    return new Promise((resolve) => setTimeout(resolve, ms));
}
function updateConnectionBanner(state) {
    const banner = $("connection-banner");
    if (state.phase === "connection-lost") {
        banner.textContent = state.error ?? "connection lost; retrying";
        banner.style.display = "";
    }
    else {
        banner.style.display = "none";
    }
}
async function refreshJobList() {
    try {
        const { jobs } = await listJobs();
        const box = $("job-list");
        box.innerHTML = "";
        for (const job of jobs) {
            box.appendChild(jobRow(job));
            if (job.state === "queued" || job.state === "running")
                startPolling(job.id);
        }
        $("connection-banner").style.display = "none";
    }
    catch {
        $("connection-banner").textContent = "cannot reach the server; retrying";
        $("connection-banner").style.display = "";
    }
}
function jobRow(job) {
    const row = document.createElement("div");
    row.className = "job-row";
    row.dataset.jobId = job.id;
    if (job.id === selectedJob)
        row.classList.add("selected");
    const title = document.createElement("div");
    title.className = "job-title";
    title.textContent = `${job.config.preset ?? "custom"} · ${job.id}`;
    const bar = document.createElement("div");
    bar.className = "progress";
    const fill = document.createElement("div");
    fill.className = `progress-fill state-${job.state}`;
    fill.style.width = `${Math.round(job.progress * 100)}%`;
    bar.appendChild(fill);
    const status = document.createElement("div");
    status.className = "job-status";
    status.textContent = jobStatusText(job);
    const actions = document.createElement("div");
    actions.className = "job-actions";
    if (job.state === "queued" || job.state === "running") {
        const cancel = document.createElement("button");
        cancel.type = "button";
        cancel.textContent = "cancel";
        cancel.addEventListener("click", async (ev) => {
            ev.stopPropagation();
            try {
                await cancelJob(job.id);
            }
            catch {
                // the poller will surface connection issues
            }
        });
        actions.appendChild(cancel);
    }
    row.append(title, bar, status, actions);
    row.addEventListener("click", () => {
        selectedJob = job.id;
        document.querySelectorAll(".job-row").forEach((el) => el.classList.remove("selected"));
        row.classList.add("selected");
        if (job.state === "done")
            void loadResult(job.id);
    });
    return row;
}
function jobStatusText(job) {
    if (job.state === "running")
        return `running ${(job.progress * 100).toFixed(0)}%`;
    if (job.state === "failed")
        return `failed: ${job.error ?? "unknown error"}`;
    if (job.state === "done" && job.summary)
        return `done · rmse ${job.summary.rmse.toFixed(4)}`;
    return job.state;
}
function updateJobRow(view, state) {
    updateConnectionBanner(state);
    const row = document.querySelector(`[data-job-id="${view.id}"]`);
    if (!row) {
        void refreshJobList();
        return;
    }
    const fill = row.querySelector(".progress-fill");
    if (fill) {
        fill.style.width = `${Math.round(state.progress * 100)}%`;
        fill.className = `progress-fill state-${view.state}`;
    }
    const status = row.querySelector(".job-status");
    if (status)
        status.textContent = jobStatusText(view);
    if (view.state === "done" || view.state === "failed")
        void refreshJobList();
}
// ---- trajectory chart ---------------------------------------------------------
async function loadResult(jobId) {
    try {
        currentResult = await jobResult(jobId);
    }
    catch (err) {
        $("chart-message").textContent =
            err instanceof ApiError ? err.message : `cannot load result: ${String(err)}`;
        return;
    }
    $("chart-message").textContent = "";
    currentDim = 0;
    snapshotIndex = 0;
    snapshotCount = 0;
    renderDimensionSelector();
    renderChart();
    await initDensityView(jobId);
}
function renderDimensionSelector() {
    const box = $("dim-selector");
    box.innerHTML = "";
    if (!currentResult || currentResult.dim <= 1)
        return;
    for (let d = 0; d < currentResult.dim; d++) {
        const btn = document.createElement("button");
        btn.type = "button";
        btn.textContent = `x${d + 1}`;
        if (d === currentDim)
            btn.classList.add("active");
        btn.addEventListener("click", () => {
            currentDim = d;
            renderDimensionSelector();
            renderChart();
        });
        box.appendChild(btn);
    }
}
function renderChart() {
    const svg = $("chart");
    svg.innerHTML = "";
    const result = currentResult;
    if (!result)
        return;
    const width = 720;
    const height = 320;
    const margin = { left: 48, right: 12, top: 12, bottom: 28 };
    const innerW = width - margin.left - margin.right;
    const innerH = height - margin.top - margin.bottom;
    const idx = decimate([...result.tau.keys()], 2000);
    const tau = idx.map((i) => result.tau[i]);
    const est = idx.map((i) => result.estimates[i][currentDim]);
    const truth = result.truth ? idx.map((i) => result.truth[i][currentDim]) : null;
    const xDomain = extentOf(tau, 0);
    const series = showTruth && truth ? est.concat(truth) : est;
    const yDomain = extentOf(series);
    const xScale = linearScale(xDomain, innerW);
    const yScale = linearScale(yDomain, innerH, true);
    const g = svgEl("g", { transform: `translate(${margin.left},${margin.top})` });
    for (const tick of axisTicks(yDomain)) {
        const y = yScale(tick);
        g.appendChild(svgEl("line", { x1: "0", x2: String(innerW), y1: String(y), y2: String(y), class: "gridline" }));
        g.appendChild(svgText(String(+tick.toPrecision(3)), -6, y + 4, "end"));
    }
    for (const tick of axisTicks(xDomain)) {
        const x = xScale(tick);
        g.appendChild(svgText(String(+tick.toPrecision(3)), x, innerH + 18, "middle"));
    }
    if (truth && showTruth) {
        g.appendChild(svgEl("polyline", {
            points: polylinePoints(tau, truth, xScale, yScale),
            fill: "none",
            stroke: TRUTH_COLOR,
            "stroke-width": "1.6",
        }));
    }
    g.appendChild(svgEl("polyline", {
        points: polylinePoints(tau, est, xScale, yScale),
        fill: "none",
        stroke: ESTIMATE_COLOR,
        "stroke-width": "1.6",
    }));
    svg.appendChild(g);
    $("rmse-readout").textContent =
        `rmse ${result.rmse.toFixed(4)} · zero-estimator ${result.zero_estimator_rmse.toFixed(4)}`;
}
function svgEl(tag, attrs) {
    const el = document.createElementNS("http://www.w3.org/2000/svg", tag);
    for (const [k, v] of Object.entries(attrs))
        el.setAttribute(k, v);
    return el;
}
function svgText(text, x, y, anchor) {
    const el = svgEl("text", { x: String(x), y: String(y), "text-anchor": anchor, class: "tick" });
    el.textContent = text;
    return el;
}
function bindChartControls() {
    $("truth-toggle").addEventListener("change", () => {
        showTruth = $("truth-toggle").checked;
        renderChart();
    });
    $("export-csv").addEventListener("click", () => {
        if (!currentResult)
            return;
        const blob = new Blob([resultToCsv(currentResult)], { type: "text/csv" });
        const a = document.createElement("a");
        a.href = URL.createObjectURL(blob);
        a.download = `estimates_${currentResult.id}.csv`;
        a.click();
        URL.revokeObjectURL(a.href);
    });
}
// ---- density view ----------------------------------------------------------------
async function initDensityView(jobId) {
    const message = $("density-message");
    const controls = $("density-controls");
    try {
        // reset per-job slice state; the first fetch pins axis 3+ at node 0 and
        // the slider jumps to mid-grid once the payload reports the node count
        sliceIndex = null;
        currentDensityNs = null;
        const first = await jobDensity(jobId, 0, undefined, densityFixedSpec());
        snapshotCount = first.snapshot_count;
        controls.style.display = "";
        message.textContent = "";
        const slider = $("snapshot-slider");
        slider.max = String(snapshotCount - 1);
        slider.value = "0";
        snapshotIndex = 0;
        currentDensityNs = first.nodes.length;
        configureSliceSlider(first.dim, first.nodes.length);
        if (first.dim > 2) {
            await refreshDensity(); // refetch at the slider's mid-grid slice
        }
        else {
            renderDensity(first);
        }
    }
    catch (err) {
        controls.style.display = "none";
        clearDensityCanvas();
        message.textContent =
            err instanceof ApiError && err.status === 422
                ? "no density snapshots were retained for this job"
                : `density view unavailable: ${err instanceof Error ? err.message : String(err)}`;
    }
}
function densityFixedSpec() {
    if (!currentResult)
        return undefined;
    const ns = currentDensityNs ?? 0;
    const index = sliceIndex ?? midIndex(ns);
    return fixedSpec(currentResult.dim, ns, index);
}
function configureSliceSlider(dim, ns) {
    const row = $("slice-row");
    if (dim <= 2) {
        row.style.display = "none";
        return;
    }
    row.style.display = "";
    const slider = $("slice-slider");
    slider.max = String(ns - 1);
    if (sliceIndex === null) {
        sliceIndex = midIndex(ns);
        slider.value = String(sliceIndex);
    }
}
let currentDensityNs = null;
let sliceIndex = null;
function clearDensityCanvas() {
    const canvas = $("density-canvas");
    canvas.getContext("2d")?.clearRect(0, 0, canvas.width, canvas.height);
}
async function refreshDensity() {
    if (!selectedJob)
        return;
    try {
        renderDensity(await jobDensity(selectedJob, snapshotIndex, undefined, densityFixedSpec()));
    }
    catch (err) {
        $("density-message").textContent = err instanceof Error ? err.message : String(err);
    }
}
function renderDensity(payload) {
    currentDensityNs = payload.nodes.length;
    const canvas = $("density-canvas");
    const ctx = canvas.getContext("2d");
    if (!ctx)
        return;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const [lo, hi] = sliceRange(payload.values);
    const scale = colorScale(lo, hi);
    const slice = sliceLabel(payload.dim, payload.nodes, sliceIndex ?? midIndex(payload.nodes.length));
    $("density-caption").textContent =
        `snapshot ${payload.snapshot + 1}/${payload.snapshot_count} · tau ${payload.tau.toFixed(3)}` +
            (slice ? ` · ${slice}` : "") +
            ` · range [${lo.toExponential(2)}, ${hi.toExponential(2)}]`;
    if (payload.dim === 1) {
        // 1-D: line plot of the density itself
        const values = payload.values;
        const n = values.length;
        const w = canvas.width;
        const h = canvas.height;
        ctx.strokeStyle = ESTIMATE_COLOR;
        ctx.lineWidth = 1.5;
        ctx.beginPath();
        for (let i = 0; i < n; i++) {
            const x = (i / Math.max(1, n - 1)) * (w - 20) + 10;
            const t = hi > lo ? (values[i] - lo) / (hi - lo) : 0.5;
            const y = h - 12 - t * (h - 24);
            if (i === 0)
                ctx.moveTo(x, y);
            else
                ctx.lineTo(x, y);
        }
        ctx.stroke();
    }
    else {
        const rows = payload.values;
        const n = rows.length;
        const cell = Math.floor(Math.min(canvas.width, canvas.height) / n);
        for (let i = 0; i < n; i++) {
            for (let j = 0; j < rows[i].length; j++) {
                ctx.fillStyle = scale.css(rows[i][j]);
                // axis 1 runs upward on screen, axis 2 to the right
                ctx.fillRect(j * cell, (n - 1 - i) * cell, cell, cell);
            }
        }
    }
    renderColorbar(scale);
}
function renderColorbar(scale) {
    const canvas = $("colorbar");
    const ctx = canvas.getContext("2d");
    if (!ctx)
        return;
    const w = canvas.width;
    for (let x = 0; x < w; x++) {
        const value = scale.min + ((scale.max - scale.min) * x) / Math.max(1, w - 1);
        ctx.fillStyle = scale.css(value);
        ctx.fillRect(x, 0, 1, canvas.height);
    }
}
function bindDensityControls() {
    const slider = $("snapshot-slider");
    slider.addEventListener("input", () => {
        snapshotIndex = Number(slider.value);
        void refreshDensity();
    });
    const slice = $("slice-slider");
    slice.addEventListener("input", () => {
        sliceIndex = Number(slice.value);
        void refreshDensity();
    });
}
// ---- boot ---------------------------------------------------------------------
function boot() {
    bindForm();
    bindChartControls();
    bindDensityControls();
    syncFormInputs();
    void refreshJobList();
    setInterval(() => void refreshJobList(), 5000);
}
document.addEventListener("DOMContentLoaded", boot);
