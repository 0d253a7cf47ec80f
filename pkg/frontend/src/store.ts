/** Client-side view state: a latest-wins buffer over the frame stream.
 *
 * Rendering reads this store and nothing else, so replaying the server's
 * frames through `applyFrame` reproduces exactly what was drawn.
 */

import type {
  CatalogFrame,
  ErrorFrame,
  EventFrame,
  ServerFrame,
  StateFrame,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "live" | "retrying";

export class CockpitStore {
  status: ConnectionStatus = "connecting";
  catalog: CatalogFrame | null = null;
  state: StateFrame | null = null;
  lastEvent: EventFrame | null = null;
  lastError: ErrorFrame | null = null;
  /** True from a capture/timeout event until the client sends reset. */
  frozen = false;
  selectedScenario: string | null = null;
  selectedPolicy: string | null = null;
  framesSeen = 0;

  setStatus(status: ConnectionStatus): void {
    this.status = status;
  }

  applyFrame(frame: ServerFrame): void {
    this.framesSeen += 1;
    switch (frame.type) {
      case "catalog":
        this.catalog = frame;
        this.selectedScenario = frame.active.scenario;
        // a catalog means the world was (re)built; stale overlays go away
        this.lastEvent = null;
        this.frozen = false;
        break;
      case "state":
        this.state = frame; // latest wins, render picks it up when it wants
        break;
      case "event":
        this.lastEvent = frame;
        this.frozen = true;
        break;
      case "error":
        this.lastError = frame;
        break;
    }
  }

  /** Call when the client sends a reset so input thaws immediately. */
  noteResetSent(): void {
    this.frozen = false;
    this.lastEvent = null;
  }

  choosePolicy(name: string): void {
    this.selectedPolicy = name;
  }

  chooseScenario(name: string): void {
    this.selectedScenario = name;
  }

  overlayText(): string | null {
    if (!this.frozen || this.lastEvent === null) return null;
    return `${this.lastEvent.name.toUpperCase()} at t=${this.lastEvent.t.toFixed(2)}s`;
  }

  bannerText(): string | null {
    if (this.status === "live") return null;
    return this.status === "connecting" ? "CONNECTING" : "RETRYING";
  }
}
