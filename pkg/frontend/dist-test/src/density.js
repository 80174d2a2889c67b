// Slice-selection helpers for the density view, kept pure for testing.
/**
 * Build the ?fixed= spec for a density request: axes (1,2) stay free and
 * every remaining dimension is pinned to `sliceIndex` (clamped to the grid).
 * Returns undefined when nothing needs fixing (dim <= 2).
 */
export function fixedSpec(dim, ns, sliceIndex) {
    if (dim <= 2)
        return undefined;
    const clamped = Math.min(Math.max(0, sliceIndex), Math.max(0, ns - 1));
    const parts = [];
    for (let d = 3; d <= dim; d++)
        parts.push(`${d}:${clamped}`);
    return parts.join(",");
}
/** Mid-grid node index: the default slice position. */
export function midIndex(ns) {
    return Math.floor(Math.max(0, ns - 1) / 2);
}
/** Node coordinate label for the slice slider caption. */
export function sliceLabel(dim, nodes, index) {
    if (dim <= 2 || nodes.length === 0)
        return "";
    const i = Math.min(Math.max(0, index), nodes.length - 1);
    const dims = [];
    for (let d = 3; d <= dim; d++)
        dims.push(`x${d}`);
    return `${dims.join(", ")} = ${nodes[i].toPrecision(4)}`;
}
