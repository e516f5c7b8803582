/** Keyframe scrubber: selections snap to the sampled frame grid. */

export interface FrameRef {
  frame_index: number;
  timestamp_s: number;
  origin: "uniform_sample" | "keyframe";
}

/** Nearest sampled frame to a slider time; earlier frame wins exact ties. */
export function snapToGrid(timestamp: number, frames: FrameRef[]): FrameRef {
  if (frames.length === 0) throw new Error("empty sample list");
  let best = frames[0];
  let bestDist = Math.abs(timestamp - best.timestamp_s);
  for (const frame of frames.slice(1)) {
    const dist = Math.abs(timestamp - frame.timestamp_s);
    if (dist < bestDist) {
      best = frame;
      bestDist = dist;
    }
  }
  return best;
}

/** Slider position (0..1) over the episode duration to a snapped frame. */
export function sliderToFrame(position: number, durationS: number, frames: FrameRef[]): FrameRef {
  const clamped = Math.min(1, Math.max(0, position));
  return snapToGrid(clamped * durationS, frames);
}
