import { describe, expect, it } from "vitest";

import { sliderToFrame, snapToGrid, type FrameRef } from "../src/scrub.js";
import { commandChoices, commandProblems, renderCommand } from "../src/commands.js";

const grid: FrameRef[] = [0, 1, 2, 3, 4, 5].map((t) => ({
  frame_index: t * 2,
  timestamp_s: t,
  origin: "uniform_sample",
}));

describe("keyframe scrubbing", () => {
  it("snaps to the nearest sampled frame", () => {
    expect(snapToGrid(2.4, grid).timestamp_s).toBe(2);
    expect(snapToGrid(2.6, grid).timestamp_s).toBe(3);
  });

  it("maps slider positions over the duration", () => {
    expect(sliderToFrame(0, 5, grid).timestamp_s).toBe(0);
    expect(sliderToFrame(1, 5, grid).timestamp_s).toBe(5);
    expect(sliderToFrame(0.5, 5, grid).timestamp_s).toBe(2); // exact tie: earlier frame wins
  });

  it("includes registered keyframes in the grid", () => {
    const withKf = [...grid, { frame_index: 5, timestamp_s: 2.6, origin: "keyframe" as const }]
      .sort((a, b) => a.timestamp_s - b.timestamp_s);
    expect(snapToGrid(2.55, withKf).origin).toBe("keyframe");
  });
});

describe("command picker", () => {
  it("renders the shared sentence forms", () => {
    expect(
      renderCommand({ arm: "left", verb: "move", direction: "right", magnitude: "slight" }),
    ).toBe("Move the left gripper to the right slightly");
    expect(renderCommand({ arm: "right", verb: "hold_still" })).toBe(
      "Hold the right arm still",
    );
  });

  it("offers the full per-arm vocabulary with no duplicates", () => {
    const texts = commandChoices("left").map(renderCommand);
    expect(texts.length).toBe(24);
    expect(new Set(texts).size).toBe(24);
    expect(texts.every((t) => t.includes("left"))).toBe(true);
  });

  it("flags conditional-field misuse", () => {
    expect(commandProblems({ arm: "left", verb: "move" })).not.toEqual([]);
    expect(commandProblems({ arm: "left", verb: "hold_still", direction: "up" })).not.toEqual([]);
    expect(commandProblems({ arm: "left", verb: "rotate", rotation: "clockwise" })).toEqual([]);
  });
});
