/** Top-down canvas drawing, straight from the store.
 *
 * Everything here is a pure function of the latest received frames; no
 * interpolation, no prediction. The Draw2D interface is the small slice
 * of CanvasRenderingContext2D actually used, which lets tests record
 * drawing calls without a DOM.
 */

import type { Camera } from "./camera.js";
import { computeCamera, worldToScreen } from "./camera.js";
import type { SensorView, StateFrame, VehicleView } from "./protocol.js";
import type { CockpitStore } from "./store.js";

export interface Draw2D {
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  globalAlpha: number;
  font: string;
  textAlign: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  setLineDash(segments: number[]): void;
  fillText(text: string, x: number, y: number): void;
}

export const CONE_HALF_ANGLE = Math.PI / 3;
export const CONE_BORESIGHT = Math.PI / 6;
export const BODY_RADIUS_M = 0.06;

/** Cones carry no usable signal when the divider reads inside the dead
 * band, so draw them faded. */
export function coneAlpha(sensor: SensorView | null): number {
  return sensor !== null && sensor.differentiable ? 0.35 : 0.12;
}

export function ringHighlighted(state: StateFrame, captureRadius: number): boolean {
  return state.separation <= captureRadius;
}

/** Marker x position in a bar of the given width; fused 0.5 sits centred. */
export function fusedMarkerX(fused: number, barWidth: number): number {
  const clamped = Math.max(0, Math.min(1, fused));
  return clamped * barWidth;
}

function drawCar(
  ctx: Draw2D,
  cam: Camera,
  w: number,
  h: number,
  vehicle: VehicleView,
  bodyColor: string,
): void {
  const { pose } = vehicle;
  const centre = worldToScreen(cam, w, h, pose.x, pose.y);
  const r = Math.max(3, BODY_RADIUS_M * cam.scale);
  ctx.beginPath();
  ctx.arc(centre.x, centre.y, r, 0, 2 * Math.PI);
  ctx.fillStyle = bodyColor;
  ctx.fill();
  // nose wedge shows heading
  const nose = worldToScreen(
    cam,
    w,
    h,
    pose.x + 1.8 * BODY_RADIUS_M * Math.cos(pose.heading),
    pose.y + 1.8 * BODY_RADIUS_M * Math.sin(pose.heading),
  );
  const back1 = worldToScreen(
    cam,
    w,
    h,
    pose.x + BODY_RADIUS_M * Math.cos(pose.heading + 2.5),
    pose.y + BODY_RADIUS_M * Math.sin(pose.heading + 2.5),
  );
  const back2 = worldToScreen(
    cam,
    w,
    h,
    pose.x + BODY_RADIUS_M * Math.cos(pose.heading - 2.5),
    pose.y + BODY_RADIUS_M * Math.sin(pose.heading - 2.5),
  );
  ctx.beginPath();
  ctx.moveTo(nose.x, nose.y);
  ctx.lineTo(back1.x, back1.y);
  ctx.lineTo(back2.x, back2.y);
  ctx.closePath();
  ctx.fillStyle = "#ffffff";
  ctx.fill();
}

function drawBeaconGlow(
  ctx: Draw2D,
  cam: Camera,
  w: number,
  h: number,
  leader: VehicleView,
): void {
  const centre = worldToScreen(cam, w, h, leader.pose.x, leader.pose.y);
  for (const [radiusM, alpha] of [
    [0.30, 0.05],
    [0.18, 0.10],
    [0.10, 0.18],
  ] as const) {
    ctx.globalAlpha = alpha;
    ctx.beginPath();
    ctx.arc(centre.x, centre.y, radiusM * cam.scale, 0, 2 * Math.PI);
    ctx.fillStyle = "#ffd24d";
    ctx.fill();
  }
  ctx.globalAlpha = 1;
}

function drawSensorCones(
  ctx: Draw2D,
  cam: Camera,
  w: number,
  h: number,
  follower: VehicleView,
  sensor: SensorView | null,
): void {
  const { pose } = follower;
  const centre = worldToScreen(cam, w, h, pose.x, pose.y);
  const reach = 0.35 * cam.scale;
  ctx.globalAlpha = coneAlpha(sensor);
  ctx.fillStyle = "#64d2ff";
  for (const side of [1, -1] as const) {
    const boresight = pose.heading + side * CONE_BORESIGHT;
    // canvas angles run clockwise on a flipped y axis
    const a0 = -(boresight + CONE_HALF_ANGLE);
    const a1 = -(boresight - CONE_HALF_ANGLE);
    ctx.beginPath();
    ctx.moveTo(centre.x, centre.y);
    ctx.arc(centre.x, centre.y, reach, a0, a1);
    ctx.closePath();
    ctx.fill();
  }
  ctx.globalAlpha = 1;
}

function drawCaptureRing(
  ctx: Draw2D,
  cam: Camera,
  w: number,
  h: number,
  state: StateFrame,
  captureRadius: number,
): void {
  const leader = state.vehicles.leader.pose;
  const centre = worldToScreen(cam, w, h, leader.x, leader.y);
  ctx.beginPath();
  ctx.arc(centre.x, centre.y, captureRadius * cam.scale, 0, 2 * Math.PI);
  ctx.setLineDash([6, 4]);
  if (ringHighlighted(state, captureRadius)) {
    ctx.strokeStyle = "#ff5c5c";
    ctx.lineWidth = 3;
  } else {
    ctx.strokeStyle = "#8888aa";
    ctx.lineWidth = 1;
  }
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.lineWidth = 1;
}

function drawHud(ctx: Draw2D, store: CockpitStore, w: number): void {
  const state = store.state;
  ctx.fillStyle = "#e8e8f0";
  ctx.font = "14px monospace";
  ctx.textAlign = "left";
  if (state !== null) {
    ctx.fillText(`separation ${state.separation.toFixed(3)} m`, 12, 22);
    ctx.fillText(`t ${state.t.toFixed(2)}s tick ${state.tick}`, 12, 40);
    ctx.fillText(`follower ${state.vehicles.follower.mode_tag}`, 12, 58);
  }

  // fused bar: centred marker means "cannot tell left from right"
  const barWidth = 160;
  const barX = w - barWidth - 12;
  const barY = 14;
  ctx.fillStyle = "#2a2a3a";
  ctx.fillRect(barX, barY, barWidth, 10);
  ctx.strokeStyle = "#8888aa";
  ctx.strokeRect(barX, barY, barWidth, 10);
  ctx.fillStyle = "#8888aa";
  ctx.fillRect(barX + barWidth / 2, barY - 2, 1, 14);
  if (state !== null && state.sensor !== null) {
    ctx.fillStyle = state.sensor.differentiable ? "#64d2ff" : "#555577";
    ctx.fillRect(barX + fusedMarkerX(state.sensor.fused, barWidth) - 2, barY - 2, 4, 14);
  }
}

export function drawScene(ctx: Draw2D, store: CockpitStore, w: number, h: number): void {
  ctx.fillStyle = "#14141c";
  ctx.fillRect(0, 0, w, h);
  const state = store.state;
  const cam = computeCamera(state, w, h);

  if (state !== null) {
    const captureRadius = store.catalog?.active.capture_radius ?? 0.12;
    drawCaptureRing(ctx, cam, w, h, state, captureRadius);
    drawBeaconGlow(ctx, cam, w, h, state.vehicles.leader);
    drawSensorCones(ctx, cam, w, h, state.vehicles.follower, state.sensor);
    drawCar(ctx, cam, w, h, state.vehicles.leader, "#ffb020");
    drawCar(ctx, cam, w, h, state.vehicles.follower, "#4090ff");
  }

  drawHud(ctx, store, w);

  const banner = store.bannerText();
  if (banner !== null) {
    ctx.fillStyle = "#ff5c5c";
    ctx.font = "16px monospace";
    ctx.textAlign = "center";
    ctx.fillText(banner, w / 2, 24);
  }

  const overlay = store.overlayText();
  if (overlay !== null) {
    ctx.globalAlpha = 0.75;
    ctx.fillStyle = "#000000";
    ctx.fillRect(0, h / 2 - 40, w, 80);
    ctx.globalAlpha = 1;
    ctx.fillStyle = "#ffffff";
    ctx.font = "28px monospace";
    ctx.textAlign = "center";
    ctx.fillText(overlay, w / 2, h / 2 + 8);
    ctx.font = "14px monospace";
    ctx.fillText("press R to reset", w / 2, h / 2 + 30);
  }
}
