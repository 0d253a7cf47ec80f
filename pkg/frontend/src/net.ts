/** WebSocket session with automatic retry.
 *
 * The socket construction and the timer are injectable so tests can run
 * the whole reconnect dance synchronously with fakes; the browser entry
 * passes the native WebSocket and setTimeout, the headless replay passes
 * the `ws` package.
 */

import type { ClientMsg, ServerFrame } from "./protocol.js";
import { encodeClientMsg, parseServerFrame } from "./protocol.js";
import type { CockpitStore } from "./store.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;
export type Scheduler = (fn: () => void, delayMs: number) => void;

export interface RetryPolicy {
  baseDelayMs: number;
  maxDelayMs: number;
}

export const DEFAULT_RETRY: RetryPolicy = { baseDelayMs: 250, maxDelayMs: 4000 };

export function retryDelayMs(attempt: number, policy: RetryPolicy = DEFAULT_RETRY): number {
  return Math.min(policy.baseDelayMs * 2 ** attempt, policy.maxDelayMs);
}

export class CockpitClient {
  private socket: SocketLike | null = null;
  private attempts = 0;
  private stopped = false;
  private open = false;
  private readonly frameListeners: Array<(frame: ServerFrame) => void> = [];

  constructor(
    private readonly url: string,
    private readonly store: CockpitStore,
    private readonly factory: SocketFactory,
    private readonly schedule: Scheduler = (fn, ms) => {
      setTimeout(fn, ms);
    },
    private readonly retry: RetryPolicy = DEFAULT_RETRY,
  ) {}

  onFrame(listener: (frame: ServerFrame) => void): void {
    this.frameListeners.push(listener);
  }

  connect(): void {
    if (this.stopped) return;
    this.store.setStatus(this.attempts === 0 ? "connecting" : "retrying");
    let settled = false; // one close/error per socket feeds one retry
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.open = true;
      this.attempts = 0;
      this.store.setStatus("live");
    };
    socket.onmessage = (event) => {
      const frame = parseServerFrame(String(event.data));
      if (frame === null) return;
      this.store.applyFrame(frame);
      for (const listener of this.frameListeners) {
        listener(frame);
      }
    };
    const lost = () => {
      if (settled) return;
      settled = true;
      this.open = false;
      this.socket = null;
      if (this.stopped) return;
      this.store.setStatus("retrying");
      const delay = retryDelayMs(this.attempts, this.retry);
      this.attempts += 1;
      this.schedule(() => this.connect(), delay);
    };
    socket.onclose = lost;
    socket.onerror = lost;
  }

  isOpen(): boolean {
    return this.open;
  }

  /** Returns false when there is no live socket to write to. */
  send(msg: ClientMsg): boolean {
    if (!this.open || this.socket === null) return false;
    this.socket.send(encodeClientMsg(msg));
    return true;
  }

  sendReset(): boolean {
    const sent = this.send({ type: "reset" });
    if (sent) this.store.noteResetSent();
    return sent;
  }

  close(): void {
    this.stopped = true;
    if (this.socket !== null) {
      this.socket.close();
      this.socket = null;
    }
    this.open = false;
  }
}
