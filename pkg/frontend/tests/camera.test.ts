import { describe, expect, it } from "vitest";

import { MIN_SPAN_M, SPAN_MARGIN, computeCamera, worldToScreen } from "../src/camera.js";
import { stateFixture } from "./helpers.js";

describe("computeCamera", () => {
  it("defaults to the origin before any state arrives", () => {
    const cam = computeCamera(null, 800, 600);
    expect(cam.cx).toBe(0);
    expect(cam.cy).toBe(0);
    expect(cam.scale).toBe(600 / MIN_SPAN_M);
  });

  it("centres between the two cars and scales to the separation", () => {
    const frame = stateFixture({ separation: 2.0 });
    frame.vehicles.leader.pose = { x: 1.0, y: 1.0, heading: 0 };
    frame.vehicles.follower.pose = { x: 3.0, y: 1.0, heading: 0 };
    const cam = computeCamera(frame, 800, 600);
    expect(cam.cx).toBe(2.0);
    expect(cam.cy).toBe(1.0);
    expect(cam.scale).toBeCloseTo(600 / (2.0 * SPAN_MARGIN), 12);
  });

  it("never zooms tighter than the minimum span", () => {
    const frame = stateFixture({ separation: 0.05 });
    const cam = computeCamera(frame, 400, 400);
    expect(cam.scale).toBe(400 / MIN_SPAN_M);
  });
});

describe("worldToScreen", () => {
  const cam = { cx: 2.0, cy: 1.0, scale: 100 };

  it("puts the camera centre mid-screen", () => {
    expect(worldToScreen(cam, 800, 600, 2.0, 1.0)).toEqual({ x: 400, y: 300 });
  });

  it("flips the y axis so world north is screen up", () => {
    const above = worldToScreen(cam, 800, 600, 2.0, 1.5);
    expect(above.x).toBe(400);
    expect(above.y).toBe(250);
    const east = worldToScreen(cam, 800, 600, 2.5, 1.0);
    expect(east.x).toBe(450);
    expect(east.y).toBe(300);
  });
});
