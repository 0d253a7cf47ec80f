/** World-to-screen mapping: keep both cars in frame, north up. */

import type { StateFrame } from "./protocol.js";

export interface Camera {
  cx: number; // world centre
  cy: number;
  scale: number; // pixels per metre
}

export const MIN_SPAN_M = 1.0;
export const SPAN_MARGIN = 1.8;

export function computeCamera(
  state: StateFrame | null,
  width: number,
  height: number,
): Camera {
  if (state === null) {
    return { cx: 0, cy: 0, scale: Math.min(width, height) / MIN_SPAN_M };
  }
  const lp = state.vehicles.leader.pose;
  const fp = state.vehicles.follower.pose;
  const span = Math.max(MIN_SPAN_M, state.separation * SPAN_MARGIN);
  return {
    cx: 0.5 * (lp.x + fp.x),
    cy: 0.5 * (lp.y + fp.y),
    scale: Math.min(width, height) / span,
  };
}

/** Screen y grows downward; world y grows up. */
export function worldToScreen(
  cam: Camera,
  width: number,
  height: number,
  x: number,
  y: number,
): { x: number; y: number } {
  return {
    x: width / 2 + (x - cam.cx) * cam.scale,
    y: height / 2 - (y - cam.cy) * cam.scale,
  };
}
