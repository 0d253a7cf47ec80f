"""Figure rendering for episode logs and sweep tables.

Everything draws through the Agg backend straight to files, so reports work
headless.  Figures land next to the data they describe unless an output
directory is given.
"""

from __future__ import annotations

import csv
import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .episodelog import read_log
from .errors import ScenarioError


def _out_path(src_path: str, out_dir: str | None, suffix: str) -> str:
    stem = os.path.splitext(os.path.basename(src_path))[0]
    directory = out_dir if out_dir else (os.path.dirname(src_path) or ".")
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, f"{stem}_{suffix}.png")


def render_episode_figures(log_path: str, out_dir: str | None = None) -> list[str]:
    """Trajectory, separation, and (when sensed) fused-signal figures."""
    header, records = read_log(log_path)
    if not records:
        raise ScenarioError(f"log {log_path} has no tick records")
    scenario = header.get("scenario", {})
    capture_radius = scenario.get("capture_radius")
    if capture_radius is None:
        capture_radius = (
            scenario.get("leader", {}).get("params", {}).get("body_radius", 0.06)
            + scenario.get("follower", {}).get("params", {}).get("body_radius", 0.06)
        )
    written: list[str] = []

    lx = [r["leader"]["x"] for r in records]
    ly = [r["leader"]["y"] for r in records]
    fx = [r["follower"]["x"] for r in records]
    fy = [r["follower"]["y"] for r in records]
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.plot(lx, ly, label="leader", color="tab:orange")
    ax.plot(fx, fy, label="follower", color="tab:blue")
    ax.plot(lx[0], ly[0], "o", color="tab:orange")
    ax.plot(fx[0], fy[0], "o", color="tab:blue")
    last = records[-1]
    if "capture" in last.get("events", []):
        ring = plt.Circle(
            (last["leader"]["x"], last["leader"]["y"]),
            capture_radius,
            fill=False,
            color="tab:red",
            linestyle="--",
            label="capture radius",
        )
        ax.add_patch(ring)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.legend(loc="best")
    ax.set_title("trajectories")
    path = _out_path(log_path, out_dir, "trajectory")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    t = [r["t"] for r in records]
    sep = [r["separation"] for r in records]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, sep, color="tab:blue")
    ax.axhline(capture_radius, color="tab:red", linestyle="--", label="capture radius")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("separation [m]")
    ax.set_ylim(bottom=0)
    ax.legend(loc="best")
    ax.set_title("separation")
    path = _out_path(log_path, out_dir, "separation")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    sensed = [(r["t"], r["sensor"]) for r in records if r.get("sensor")]
    if sensed:
        dead_band = scenario.get("follower", {}).get("rig", {}).get("dead_band", 0.02)
        ts = [s[0] for s in sensed]
        fused = [s[1]["fused"] for s in sensed]
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(ts, fused, color="tab:green", linewidth=0.8)
        ax.axhspan(0.5 - dead_band, 0.5 + dead_band, color="gray", alpha=0.3,
                   label="dead band")
        ax.set_xlabel("t [s]")
        ax.set_ylabel("fused reading")
        ax.set_ylim(0, 1)
        ax.legend(loc="best")
        ax.set_title("fused sensor signal")
        path = _out_path(log_path, out_dir, "sensor")
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(path)
    return written


def render_sweep_figures(csv_path: str, out_dir: str | None = None) -> list[str]:
    """Capture rate and mean time-to-capture against start separation."""
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"distance_m", "capture_rate", "mean_time_s", "n"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ScenarioError(
                f"sweep table {csv_path} must have columns {sorted(required)}"
            )
        rows = list(reader)
    if not rows:
        raise ScenarioError(f"sweep table {csv_path} is empty")
    dist = [float(r["distance_m"]) for r in rows]
    rate = [float(r["capture_rate"]) for r in rows]
    mean_t = [float(r["mean_time_s"]) for r in rows]
    written: list[str] = []

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(dist, rate, marker="o", color="tab:blue")
    ax.set_xlabel("start separation [m]")
    ax.set_ylabel("capture rate")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title("capture rate vs start separation")
    path = _out_path(csv_path, out_dir, "capture_rate")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    pairs = [(d, t) for d, t in zip(dist, mean_t) if not math.isnan(t)]
    if pairs:
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot([p[0] for p in pairs], [p[1] for p in pairs], marker="s",
                color="tab:orange")
        ax.set_xlabel("start separation [m]")
        ax.set_ylabel("mean time to capture [s]")
        ax.set_title("time to capture vs start separation")
        path = _out_path(csv_path, out_dir, "mean_time")
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(path)
    return written
