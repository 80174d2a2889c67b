// Heatmap color scale: a compact viridis-style ramp interpolated in RGB.
const STOPS = [
    [68, 1, 84],
    [59, 82, 139],
    [33, 145, 140],
    [94, 201, 98],
    [253, 231, 37],
];
export function colorScale(min, max) {
    const span = max - min;
    const rgb = (value) => {
        let t = span > 0 ? (value - min) / span : 0.5;
        if (!Number.isFinite(t))
            t = 0;
        t = Math.min(1, Math.max(0, t));
        const x = t * (STOPS.length - 1);
        const i = Math.min(STOPS.length - 2, Math.floor(x));
        const frac = x - i;
        const a = STOPS[i];
        const b = STOPS[i + 1];
        return [
            Math.round(a[0] + frac * (b[0] - a[0])),
            Math.round(a[1] + frac * (b[1] - a[1])),
            Math.round(a[2] + frac * (b[2] - a[2])),
        ];
    };
    return {
        min,
        max,
        rgb,
        css(value) {
            const [r, g, b] = rgb(value);
            return `rgb(${r},${g},${b})`;
        },
    };
}
/** Scale bounds from slice data: exactly the slice's min and max. */
export function sliceRange(values) {
    let min = Infinity;
    let max = -Infinity;
    const scan = (v) => {
        if (!Number.isFinite(v))
            return;
        if (v < min)
            min = v;
        if (v > max)
            max = v;
    };
    for (const row of values) {
        if (Array.isArray(row))
            row.forEach(scan);
        else
            scan(row);
    }
    if (min === Infinity)
        return [0, 1];
    return [min, max];
}
