import assert from "node:assert/strict";
import { test } from "node:test";

import {
  ESTIMATE_COLOR,
  TRUTH_COLOR,
  axisTicks,
  decimate,
  extentOf,
  linearScale,
  polylinePoints,
} from "../src/charts.js";

test("extent pads the data range", () => {
  const e = extentOf([0, 10], 0.05);
  assert.equal(e.min, -0.5);
  assert.equal(e.max, 10.5);
});

test("extent handles constant series", () => {
  const e = extentOf([2, 2, 2]);
  assert.ok(e.min < 2 && e.max > 2);
});

test("extent ignores non-finite values", () => {
  const e = extentOf([1, NaN, Infinity, 3], 0);
  assert.equal(e.min, 1);
  assert.equal(e.max, 3);
});

test("linear scale endpoints and inversion", () => {
  const s = linearScale({ min: 0, max: 10 }, 200);
  assert.equal(s(0), 0);
  assert.equal(s(10), 200);
  assert.equal(s.invert(100), 5);
});

test("flipped scale maps min to the bottom pixel", () => {
  const s = linearScale({ min: 0, max: 10 }, 200, true);
  assert.equal(s(0), 200);
  assert.equal(s(10), 0);
});

test("polyline emits one point per finite sample", () => {
  const x = linearScale({ min: 0, max: 2 }, 100);
  const y = linearScale({ min: 0, max: 1 }, 100, true);
  const points = polylinePoints([0, 1, 2], [0, NaN, 1], x, y);
  assert.equal(points, "0.00,100.00 100.00,0.00");
});

test("decimate keeps endpoints and respects the cap", () => {
  const data = [...Array(10000).keys()];
  const out = decimate(data, 500);
  assert.ok(out.length <= 501);
  assert.equal(out[0], 0);
  assert.equal(out[out.length - 1], 9999);
});

test("decimate leaves short series alone", () => {
  const data = [1, 2, 3];
  assert.deepEqual(decimate(data, 500), data);
});

test("axis ticks span the domain", () => {
  const ticks = axisTicks({ min: 0, max: 1 }, 5);
  assert.equal(ticks.length, 5);
  assert.equal(ticks[0], 0);
  assert.equal(ticks[4], 1);
});

test("figure colors follow the blue-truth red-estimate convention", () => {
  assert.equal(TRUTH_COLOR, "#1f77b4");
  assert.equal(ESTIMATE_COLOR, "#d62728");
});
