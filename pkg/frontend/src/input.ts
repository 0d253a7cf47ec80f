/** Key state to drive messages.
 *
 * Held WASD/arrow keys mix into throttle/steer in [-1, 1]; positive steer
 * turns left, matching the service's wheel mixer. Changes go out
 * immediately, a held nonzero drive repeats at 20 Hz (the server's
 * dead-man cuts the throttle after half a second of silence), and a
 * release sends one zero drive and then nothing.
 */

import type { DriveMsg } from "./protocol.js";

export type Direction = "forward" | "back" | "left" | "right";

export const KEY_BINDINGS: Readonly<Record<string, Direction>> = {
  KeyW: "forward",
  ArrowUp: "forward",
  KeyS: "back",
  ArrowDown: "back",
  KeyA: "left",
  ArrowLeft: "left",
  KeyD: "right",
  ArrowRight: "right",
};

export interface Drive {
  throttle: number;
  steer: number;
}

export function keysToDrive(held: ReadonlySet<Direction>): Drive {
  const throttle = (held.has("forward") ? 1 : 0) + (held.has("back") ? -1 : 0);
  const steer = (held.has("left") ? 1 : 0) + (held.has("right") ? -1 : 0);
  return { throttle, steer };
}

export const REPEAT_MS = 50;

export class InputLoop {
  private held = new Set<Direction>();
  private frozen = false;
  private lastSent: Drive | null = null;
  private lastSentAt = -Infinity;

  constructor(
    private readonly send: (msg: DriveMsg) => void,
    private readonly repeatMs: number = REPEAT_MS,
  ) {}

  setKey(direction: Direction, down: boolean): void {
    if (down) {
      this.held.add(direction);
    } else {
      this.held.delete(direction);
    }
  }

  /** Key code helper for DOM listeners; returns false for unbound keys. */
  handleKeyCode(code: string, down: boolean): boolean {
    const direction = KEY_BINDINGS[code];
    if (direction === undefined) return false;
    this.setKey(direction, down);
    return true;
  }

  /** While frozen (after a capture/timeout event) no drives go out. */
  setFrozen(frozen: boolean): void {
    this.frozen = frozen;
  }

  current(): Drive {
    return this.frozen ? { throttle: 0, steer: 0 } : keysToDrive(this.held);
  }

  /** Call on every key change and on a short timer (25 ms is plenty). */
  tick(nowMs: number): void {
    if (this.frozen) return;
    const drive = this.current();
    const changed =
      this.lastSent === null ||
      drive.throttle !== this.lastSent.throttle ||
      drive.steer !== this.lastSent.steer;
    const idle = drive.throttle === 0 && drive.steer === 0;
    if (!changed && (idle || nowMs - this.lastSentAt < this.repeatMs)) {
      return;
    }
    this.send({ type: "drive", drive });
    this.lastSent = drive;
    this.lastSentAt = nowMs;
  }
}
