import { describe, expect, it } from "vitest";

import {
  coneAlpha,
  drawScene,
  fusedMarkerX,
  ringHighlighted,
  type Draw2D,
} from "../src/render.js";
import { CockpitStore } from "../src/store.js";
import { catalogFixture, stateFixture } from "./helpers.js";

/** Records every call so assertions can grep the draw stream. */
class RecordingCtx implements Draw2D {
  fillStyle = "";
  strokeStyle = "";
  lineWidth = 1;
  globalAlpha = 1;
  font = "";
  textAlign = "";
  calls: string[] = [];
  texts: string[] = [];

  private log(name: string): void {
    this.calls.push(name);
  }

  clearRect(): void {
    this.log("clearRect");
  }
  fillRect(): void {
    this.log("fillRect");
  }
  strokeRect(): void {
    this.log("strokeRect");
  }
  beginPath(): void {
    this.log("beginPath");
  }
  arc(): void {
    this.log("arc");
  }
  moveTo(): void {
    this.log("moveTo");
  }
  lineTo(): void {
    this.log("lineTo");
  }
  closePath(): void {
    this.log("closePath");
  }
  fill(): void {
    this.log("fill");
  }
  stroke(): void {
    this.log("stroke");
  }
  setLineDash(): void {
    this.log("setLineDash");
  }
  fillText(text: string): void {
    this.log("fillText");
    this.texts.push(text);
  }
}

describe("coneAlpha", () => {
  it("dims the cones when the divider cannot tell left from right", () => {
    expect(coneAlpha({ fused: 0.5, differentiable: true })).toBe(0.35);
    expect(coneAlpha({ fused: 0.5, differentiable: false })).toBe(0.12);
    expect(coneAlpha(null)).toBe(0.12);
  });
});

describe("ringHighlighted", () => {
  it("lights up exactly when separation is inside the capture radius", () => {
    expect(ringHighlighted(stateFixture({ separation: 0.11 }), 0.12)).toBe(true);
    expect(ringHighlighted(stateFixture({ separation: 0.12 }), 0.12)).toBe(true);
    expect(ringHighlighted(stateFixture({ separation: 0.13 }), 0.12)).toBe(false);
  });
});

describe("fusedMarkerX", () => {
  it("centres a balanced reading", () => {
    expect(fusedMarkerX(0.5, 160)).toBe(80);
  });

  it("clamps out-of-range readings to the bar", () => {
    expect(fusedMarkerX(-0.3, 160)).toBe(0);
    expect(fusedMarkerX(1.7, 160)).toBe(160);
    expect(fusedMarkerX(0.25, 160)).toBe(40);
  });
});

describe("drawScene", () => {
  it("renders an empty store without throwing", () => {
    const ctx = new RecordingCtx();
    const store = new CockpitStore();
    drawScene(ctx, store, 800, 600);
    expect(ctx.calls).toContain("fillRect"); // background
    expect(ctx.texts).toContain("CONNECTING");
  });

  it("shows the HUD readouts for a live frame", () => {
    const ctx = new RecordingCtx();
    const store = new CockpitStore();
    store.setStatus("live");
    store.applyFrame(catalogFixture());
    store.applyFrame(stateFixture({ separation: 0.25, t: 1.5, tick: 75 }));
    drawScene(ctx, store, 800, 600);
    expect(ctx.texts).toContain("separation 0.250 m");
    expect(ctx.texts).toContain("t 1.50s tick 75");
    expect(ctx.texts).toContain("follower track");
    expect(ctx.texts).not.toContain("CONNECTING");
    expect(ctx.calls).toContain("setLineDash"); // capture ring
    expect(ctx.calls).toContain("arc");
  });

  it("paints the capture overlay while frozen", () => {
    const ctx = new RecordingCtx();
    const store = new CockpitStore();
    store.setStatus("live");
    store.applyFrame(stateFixture());
    store.applyFrame({ type: "event", v: 1, name: "capture", tick: 90, t: 1.8 });
    drawScene(ctx, store, 800, 600);
    expect(ctx.texts).toContain("CAPTURE at t=1.80s");
    expect(ctx.texts).toContain("press R to reset");
  });

  it("shows the retry banner over the last known frame", () => {
    const ctx = new RecordingCtx();
    const store = new CockpitStore();
    store.applyFrame(stateFixture());
    store.setStatus("retrying");
    drawScene(ctx, store, 640, 480);
    expect(ctx.texts).toContain("RETRYING");
    expect(ctx.texts).toContain("separation 1.000 m");
  });
});
