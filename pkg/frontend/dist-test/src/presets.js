// The benchmark presets, mirrored from the engine so one click fills the form.
export const PRESETS = {
    cubic1d: {
        model: { dim: 1, obs_dim: 1, drift: ["cos(x1)"], observation: ["x1^3"] },
        time: { total: 20.0, dt: 0.001, dtau: 0.005 },
        space: { ds: 0.5, bounds: "data-driven" },
        seed: 42,
        init_density: { kind: "gaussian", sigma: 1.0 },
        snapshots: 20,
        preset: "cubic1d",
    },
    cubic3d: {
        model: {
            dim: 3,
            obs_dim: 3,
            drift: ["cos(x1)", "cos(x2)", "cos(x3)"],
            observation: ["x1^3", "x2^3", "x3^3"],
        },
        time: { total: 20.0, dt: 0.001, dtau: 0.005 },
        space: { ds: 0.5, bounds: [-3.0, 3.0] },
        seed: 42,
        init_density: { kind: "gaussian", sigma: 1.0 },
        snapshots: 20,
        preset: "cubic3d",
    },
    almostlinear: {
        model: {
            dim: 1,
            obs_dim: 1,
            drift: ["0"],
            observation: ["x1*(1+0.25*cos(x1))"],
        },
        time: { total: 50.0, dt: 0.0001, dtau: 0.0005 },
        space: { ds: 0.5, bounds: "data-driven" },
        seed: 42,
        init_density: { kind: "gaussian", sigma: 1.0 },
        snapshots: 20,
        preset: "almostlinear",
    },
};
export const PRESET_NAMES = Object.keys(PRESETS);
