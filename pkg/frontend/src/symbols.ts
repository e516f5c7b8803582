/**
 * Client-side symbol drafts: drag handling, validation, canonical
 * serialization, and footprint bounding boxes.
 *
 * Serialization must be byte-identical to the server's canonical symbol code
 * (same key order, same formatting); the round-trip test asserts the server
 * echoes exactly what the client sent.  Client validation is a strict subset
 * of server validation — anything rejected here would 422 on the server, and
 * the server stays authoritative for everything else.
 */

export type SymbolKind =
  | "straight_arrow"
  | "semi_circular_arrow"
  | "dual_crosshairs"
  | "crosshair"
  | "gripper_state"
  | "prohibition"
  | "rewind";

export type Arm = "left" | "right" | "none";
export type AxisColor = "red" | "green" | "blue";
export type RotationDir = "clockwise" | "counterclockwise";
export type GripperState = "on" | "off";
export type Magnitude = "slight" | "significant";
export type Purpose = "avoidance" | "correction";

export const ALL_KINDS: SymbolKind[] = [
  "straight_arrow",
  "semi_circular_arrow",
  "dual_crosshairs",
  "crosshair",
  "gripper_state",
  "prohibition",
  "rewind",
];

/** Kinds placed with a click; the rest are placed by dragging start -> end. */
export const CLICK_KINDS = new Set<SymbolKind>([
  "semi_circular_arrow",
  "crosshair",
  "gripper_state",
  "prohibition",
  "rewind",
]);

export const ARM_REQUIRED_KINDS = new Set<SymbolKind>([
  "straight_arrow",
  "semi_circular_arrow",
  "gripper_state",
  "prohibition",
]);

export type Point = [number, number];

export interface SymbolDraft {
  kind: SymbolKind;
  start: Point;
  end?: Point;
  color?: AxisColor;
  rotationDir?: RotationDir;
  gripperState?: GripperState;
  arm: Arm;
  magnitude?: Magnitude;
}

/** Toolbar state when a drag completes. */
export interface ToolState {
  kind: SymbolKind;
  arm: Arm;
  color?: AxisColor;
  rotationDir?: RotationDir;
  gripperState?: GripperState;
  magnitude?: Magnitude;
}

export interface DraftProblem {
  field: string;
  message: string;
}

const round = (v: number) => Math.round(v);

/** Turn a completed drag gesture into a draft (the drawing operation). */
export function finishDrag(
  tool: ToolState,
  startX: number,
  startY: number,
  endX: number,
  endY: number,
): SymbolDraft {
  const draft: SymbolDraft = {
    kind: tool.kind,
    start: [round(startX), round(startY)],
    arm: tool.arm,
  };
  if (!CLICK_KINDS.has(tool.kind)) {
    draft.end = [round(endX), round(endY)];
  }
  if (tool.kind === "straight_arrow") {
    draft.color = tool.color;
    draft.magnitude = tool.magnitude;
  } else if (tool.kind === "semi_circular_arrow") {
    draft.rotationDir = tool.rotationDir;
  } else if (tool.kind === "gripper_state") {
    draft.gripperState = tool.gripperState;
  }
  return draft;
}

/** Conditional-field and bounds checks (subset of the server's validator). */
export function draftProblems(
  draft: SymbolDraft,
  frameWidth?: number,
  frameHeight?: number,
): DraftProblem[] {
  const problems: DraftProblem[] = [];
  const needEnd = draft.kind === "straight_arrow" || draft.kind === "dual_crosshairs";
  if (needEnd && !draft.end) {
    problems.push({ field: "end", message: "drag to set the end point" });
  }
  if (!needEnd && draft.end) {
    problems.push({ field: "end", message: `${draft.kind} takes no end point` });
  }
  if (draft.kind === "straight_arrow") {
    if (!draft.color) problems.push({ field: "color", message: "pick an axis color" });
    if (draft.end && draft.end[0] === draft.start[0] && draft.end[1] === draft.start[1]) {
      problems.push({ field: "end", message: "arrow start and end coincide" });
    }
  } else if (draft.color) {
    problems.push({ field: "color", message: `${draft.kind} takes no color` });
  }
  if (draft.kind === "semi_circular_arrow" && !draft.rotationDir) {
    problems.push({ field: "rotationDir", message: "pick a rotation direction" });
  }
  if (draft.kind === "gripper_state" && !draft.gripperState) {
    problems.push({ field: "gripperState", message: "pick on (close) or off (open)" });
  }
  if (draft.magnitude && draft.kind !== "straight_arrow") {
    problems.push({ field: "magnitude", message: "magnitude applies to arrows only" });
  }
  if (ARM_REQUIRED_KINDS.has(draft.kind) && draft.arm === "none") {
    problems.push({ field: "arm", message: "pick the left or right arm" });
  }
  if (frameWidth !== undefined && frameHeight !== undefined) {
    const points: Point[] = draft.end ? [draft.start, draft.end] : [draft.start];
    for (const [x, y] of points) {
      if (x < 0 || y < 0 || x >= frameWidth || y >= frameHeight) {
        problems.push({
          field: "start",
          message: `point (${x},${y}) is outside the ${frameWidth}x${frameHeight} frame`,
        });
      }
    }
  }
  return problems;
}

const fmtPoint = (p: Point) => `(${p[0]},${p[1]})`;

/** One canonical symbol line; key order matches the server emitter exactly. */
export function serializeDraft(draft: SymbolDraft): string {
  const parts: string[] = [`arm=${draft.arm}`];
  if (draft.color) parts.push(`color=${draft.color}`);
  if (draft.rotationDir) parts.push(`dir=${draft.rotationDir}`);
  if (draft.gripperState) parts.push(`state=${draft.gripperState}`);
  parts.push(`start=${fmtPoint(draft.start)}`);
  if (draft.end) parts.push(`end=${fmtPoint(draft.end)}`);
  if (draft.magnitude) parts.push(`mag=${draft.magnitude}`);
  return `${draft.kind}(${parts.join(", ")})`;
}

/** Canonical symbol code for a whole drawing (header + one line per draft). */
export function serializeSymbolSet(
  frameIndex: number,
  purpose: Purpose,
  drafts: SymbolDraft[],
): string {
  const lines = [`frame=${frameIndex} purpose=${purpose}`];
  for (const draft of drafts) lines.push(serializeDraft(draft));
  return lines.map((line) => line + "\n").join("");
}

export type BBox = [number, number, number, number];

/**
 * Footprint bounding box: every anchor point padded by the glyph radius,
 * clamped at the frame origin — the same rule the server applies.
 */
export function draftsBBox(drafts: SymbolDraft[], glyphRadius: number): BBox | null {
  if (drafts.length === 0) return null;
  const xs: number[] = [];
  const ys: number[] = [];
  for (const draft of drafts) {
    const points: Point[] = draft.end ? [draft.start, draft.end] : [draft.start];
    for (const [x, y] of points) {
      xs.push(x - glyphRadius, x + glyphRadius);
      ys.push(y - glyphRadius, y + glyphRadius);
    }
  }
  return [
    Math.max(0, Math.min(...xs)),
    Math.max(0, Math.min(...ys)),
    Math.max(...xs),
    Math.max(...ys),
  ];
}
