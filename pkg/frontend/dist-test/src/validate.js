// Client-side mirror of the server's config validation: catches the cheap
// mistakes (nesting, empty fields) before submitting; the server remains the
// authority and its field-level issues are rendered inline when they arrive.
export function defaultForm() {
    return {
        dim: 1,
        obsDim: 1,
        driftTexts: ["cos(x1)"],
        obsTexts: ["x1^3"],
        total: 20,
        dt: 0.001,
        dtau: 0.005,
        ds: 0.5,
        boundsMode: "data-driven",
        lo: -5,
        hi: 5,
        seed: 42,
        initKind: "gaussian",
        initSigma: 1,
        snapshots: 20,
    };
}
/** dtau/dt must be a positive integer (within floating-point slack). */
export function nestingRatio(dtau, dt) {
    if (!(dt > 0) || !(dtau > 0))
        return null;
    const ratio = dtau / dt;
    const rounded = Math.round(ratio);
    if (rounded < 1 || Math.abs(ratio - rounded) > 1e-9 * Math.max(ratio, 1)) {
        return null;
    }
    return rounded;
}
export function validateForm(form) {
    const issues = [];
    if (!Number.isInteger(form.dim) || form.dim < 1) {
        issues.push({ field: "dim", message: "state dimension must be a positive integer" });
    }
    if (!Number.isInteger(form.obsDim) || form.obsDim < 1) {
        issues.push({ field: "obsDim", message: "observation dimension must be a positive integer" });
    }
    form.driftTexts.forEach((text, i) => {
        if (!text.trim())
            issues.push({ field: `drift[${i}]`, message: "expression is empty" });
    });
    form.obsTexts.forEach((text, i) => {
        if (!text.trim())
            issues.push({ field: `observation[${i}]`, message: "expression is empty" });
    });
    if (form.driftTexts.length !== form.dim) {
        issues.push({ field: "drift", message: `need ${form.dim} drift expressions` });
    }
    if (form.obsTexts.length !== form.obsDim) {
        issues.push({ field: "observation", message: `need ${form.obsDim} observation expressions` });
    }
    if (!(form.total > 0))
        issues.push({ field: "total", message: "T must be positive" });
    if (!(form.dt > 0))
        issues.push({ field: "dt", message: "dt must be positive" });
    if (!(form.dtau > 0))
        issues.push({ field: "dtau", message: "dtau must be positive" });
    if (form.dt > 0 && form.dtau > 0 && nestingRatio(form.dtau, form.dt) === null) {
        issues.push({ field: "dtau", message: "dtau must be an integer multiple of dt" });
    }
    if (form.total > 0 && form.dtau > 0 && nestingRatio(form.total, form.dtau) === null) {
        issues.push({ field: "total", message: "T must be an integer multiple of dtau" });
    }
    if (!(form.ds > 0))
        issues.push({ field: "ds", message: "ds must be positive" });
    if (form.boundsMode === "fixed") {
        if (!(form.hi - form.lo >= 2 * form.ds)) {
            issues.push({ field: "bounds", message: "need hi - lo >= 2*ds" });
        }
    }
    if (!Number.isInteger(form.seed)) {
        issues.push({ field: "seed", message: "seed must be an integer" });
    }
    if (form.initKind === "gaussian" && !(form.initSigma > 0)) {
        issues.push({ field: "initSigma", message: "sigma must be positive" });
    }
    if (!Number.isInteger(form.snapshots) || form.snapshots < 0) {
        issues.push({ field: "snapshots", message: "snapshots must be a non-negative integer" });
    }
    return issues;
}
export function formToConfig(form) {
    return {
        model: {
            dim: form.dim,
            obs_dim: form.obsDim,
            drift: form.driftTexts.slice(),
            observation: form.obsTexts.slice(),
        },
        time: { total: form.total, dt: form.dt, dtau: form.dtau },
        space: {
            ds: form.ds,
            bounds: form.boundsMode === "fixed" ? [form.lo, form.hi] : "data-driven",
        },
        seed: form.seed,
        init_density: form.initKind === "gaussian"
            ? { kind: "gaussian", sigma: form.initSigma }
            : { kind: "uniform" },
        snapshots: form.snapshots,
    };
}
/** Inverse of formToConfig, used by the preset buttons. */
export function configToForm(config) {
    const form = defaultForm();
    form.dim = config.model.dim;
    form.obsDim = config.model.obs_dim;
    form.driftTexts = config.model.drift.slice();
    form.obsTexts = config.model.observation.slice();
    form.total = config.time.total;
    form.dt = config.time.dt;
    form.dtau = config.time.dtau;
    form.ds = config.space.ds;
    if (config.space.bounds === "data-driven") {
        form.boundsMode = "data-driven";
    }
    else {
        form.boundsMode = "fixed";
        form.lo = config.space.bounds[0];
        form.hi = config.space.bounds[1];
    }
    form.seed = config.seed;
    if (config.init_density) {
        form.initKind = config.init_density.kind;
        if (config.init_density.sigma !== undefined)
            form.initSigma = config.init_density.sigma;
    }
    if (config.snapshots !== undefined)
        form.snapshots = config.snapshots;
    return form;
}
/** Keep expression lists in step with a dimension change. */
export function resizeExpressions(texts, n, placeholder) {
    const out = texts.slice(0, n);
    while (out.length < n)
        out.push(placeholder);
    return out;
}
