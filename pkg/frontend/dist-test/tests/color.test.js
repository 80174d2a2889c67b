import assert from "node:assert/strict";
import { test } from "node:test";
import { colorScale, sliceRange } from "../src/color.js";
test("scale endpoints hit the ramp ends", () => {
    const scale = colorScale(0, 1);
    assert.deepEqual(scale.rgb(0), [68, 1, 84]);
    assert.deepEqual(scale.rgb(1), [253, 231, 37]);
});
test("values are clamped to the range", () => {
    const scale = colorScale(0, 1);
    assert.deepEqual(scale.rgb(-5), scale.rgb(0));
    assert.deepEqual(scale.rgb(7), scale.rgb(1));
});
test("degenerate range maps everything mid-ramp", () => {
    const scale = colorScale(3, 3);
    assert.deepEqual(scale.rgb(3), scale.rgb(100));
});
test("css output format", () => {
    const scale = colorScale(0, 1);
    assert.match(scale.css(0.5), /^rgb\(\d+,\d+,\d+\)$/);
});
test("slice range equals the data min and max", () => {
    assert.deepEqual(sliceRange([0.2, 0.9, 0.1]), [0.1, 0.9]);
    assert.deepEqual(sliceRange([[0.5, 2.5], [1.5, -0.5]]), [-0.5, 2.5]);
});
test("slice range of empty/non-finite data is safe", () => {
    assert.deepEqual(sliceRange([NaN, Infinity]), [0, 1]);
});
