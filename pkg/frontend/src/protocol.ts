/** Wire types for the simulator service, plus guards for inbound frames.
 *
 * Everything the cockpit knows about the world comes through these frames;
 * there is no client-side physics. All frames carry `v: 1`.
 */

export const PROTOCOL_VERSION = 1;

export interface Pose {
  x: number;
  y: number;
  heading: number;
}

export interface WheelCommand {
  left: number;
  right: number;
}

export interface VehicleView {
  pose: Pose;
  command: WheelCommand;
  mode_tag: string;
}

export interface SensorView {
  fused: number;
  differentiable: boolean;
}

export interface CatalogFrame {
  type: "catalog";
  v: number;
  scenarios: string[];
  policies: string[];
  active: {
    scenario: string | null;
    dt: number;
    realtime_factor: number;
    capture_radius: number;
  };
}

export interface StateFrame {
  type: "state";
  v: number;
  tick: number;
  t: number;
  vehicles: { leader: VehicleView; follower: VehicleView };
  sensor: SensorView | null;
  separation: number;
  events: string[];
  paused: boolean;
}

export interface EventFrame {
  type: "event";
  v: number;
  name: string; // "capture" | "timeout"
  tick: number;
  t: number;
}

export interface ErrorFrame {
  type: "error";
  v: number;
  message: string;
  field?: string;
}

export type ServerFrame = CatalogFrame | StateFrame | EventFrame | ErrorFrame;

export interface DriveMsg {
  type: "drive";
  drive: { throttle: number; steer: number };
}

export interface SetPolicyMsg {
  type: "set_policy";
  policy_name: string;
}

export interface ResetMsg {
  type: "reset";
}

export interface SelectScenarioMsg {
  type: "select_scenario";
  scenario_name: string;
}

export type ClientMsg = DriveMsg | SetPolicyMsg | ResetMsg | SelectScenarioMsg;

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function isPose(value: unknown): value is Pose {
  return (
    isRecord(value) &&
    typeof value.x === "number" &&
    typeof value.y === "number" &&
    typeof value.heading === "number"
  );
}

function isVehicle(value: unknown): value is VehicleView {
  if (!isRecord(value)) return false;
  const command = value.command;
  return (
    isPose(value.pose) &&
    isRecord(command) &&
    typeof command.left === "number" &&
    typeof command.right === "number" &&
    typeof value.mode_tag === "string"
  );
}

function isStringArray(value: unknown): value is string[] {
  return Array.isArray(value) && value.every((item) => typeof item === "string");
}

/** Parse one inbound text frame; null for anything malformed.
 *
 * The cockpit must survive junk on the wire without tearing down the
 * session, so this never throws.
 */
export function parseServerFrame(raw: string): ServerFrame | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (!isRecord(data) || typeof data.v !== "number") return null;
  switch (data.type) {
    case "catalog": {
      const active = data.active;
      if (
        !isStringArray(data.scenarios) ||
        !isStringArray(data.policies) ||
        !isRecord(active) ||
        typeof active.dt !== "number" ||
        typeof active.realtime_factor !== "number" ||
        typeof active.capture_radius !== "number"
      ) {
        return null;
      }
      return data as unknown as CatalogFrame;
    }
    case "state": {
      const vehicles = data.vehicles;
      if (
        typeof data.tick !== "number" ||
        typeof data.t !== "number" ||
        typeof data.separation !== "number" ||
        typeof data.paused !== "boolean" ||
        !Array.isArray(data.events) ||
        !isRecord(vehicles) ||
        !isVehicle(vehicles.leader) ||
        !isVehicle(vehicles.follower)
      ) {
        return null;
      }
      const sensor = data.sensor;
      if (sensor !== null) {
        if (
          !isRecord(sensor) ||
          typeof sensor.fused !== "number" ||
          typeof sensor.differentiable !== "boolean"
        ) {
          return null;
        }
      }
      return data as unknown as StateFrame;
    }
    case "event":
      if (
        typeof data.name !== "string" ||
        typeof data.tick !== "number" ||
        typeof data.t !== "number"
      ) {
        return null;
      }
      return data as unknown as EventFrame;
    case "error":
      if (typeof data.message !== "string") return null;
      return data as unknown as ErrorFrame;
    default:
      return null;
  }
}

/** Leader-to-follower distance recomputed from the broadcast poses.
 *
 * The headless replay check compares this against the frame's own
 * `separation` field; they must agree to 1e-9.
 */
export function separationFromPoses(frame: StateFrame): number {
  const lp = frame.vehicles.leader.pose;
  const fp = frame.vehicles.follower.pose;
  return Math.hypot(lp.x - fp.x, lp.y - fp.y);
}

export function encodeClientMsg(msg: ClientMsg): string {
  return JSON.stringify(msg);
}
