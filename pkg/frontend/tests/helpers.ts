/** Frame fixtures shared by the unit tests. */

import type { CatalogFrame, StateFrame, VehicleView } from "../src/protocol.js";

export function vehicleFixture(
  x: number,
  y: number,
  heading = 0,
  modeTag = "cruise",
): VehicleView {
  return {
    pose: { x, y, heading },
    command: { left: 0.3, right: 0.3 },
    mode_tag: modeTag,
  };
}

export function stateFixture(overrides: Partial<StateFrame> = {}): StateFrame {
  const leader = vehicleFixture(1.0, 0.0, 0.0, "straight");
  const follower = vehicleFixture(0.0, 0.0, 0.0, "track");
  return {
    type: "state",
    v: 1,
    tick: 10,
    t: 0.2,
    vehicles: { leader, follower },
    sensor: { fused: 0.5, differentiable: true },
    separation: 1.0,
    events: [],
    paused: false,
    ...overrides,
  };
}

export function catalogFixture(overrides: Partial<CatalogFrame> = {}): CatalogFrame {
  return {
    type: "catalog",
    v: 1,
    scenarios: ["human_leader", "near_chase"],
    policies: ["light_follow", "direct_intercept"],
    active: {
      scenario: "human_leader",
      dt: 0.02,
      realtime_factor: 1.0,
      capture_radius: 0.12,
    },
    ...overrides,
  };
}
