/**
 * Drawing canvas: drag interactions and live preview.
 *
 * Preview geometry mirrors the server renderer (same radii, arc extents, and
 * arrowhead lengths from the shared style document), so what the annotator
 * sees is what the stored overlay will look like.
 */

import { axisRgb, cssRgb, DEFAULT_STYLE, type GlyphStyle } from "./style.js";
import {
  CLICK_KINDS,
  draftProblems,
  finishDrag,
  type SymbolDraft,
  type ToolState,
} from "./symbols.js";

export interface DrawingCallbacks {
  onDraft(draft: SymbolDraft): void;
  onRejected(messages: string[]): void;
}

export class DrawingCanvas {
  private drafts: SymbolDraft[] = [];
  private dragStart: [number, number] | null = null;
  private dragCurrent: [number, number] | null = null;
  private frame: HTMLImageElement | null = null;
  style: GlyphStyle = DEFAULT_STYLE;
  tool: ToolState = { kind: "crosshair", arm: "none" };

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly callbacks: DrawingCallbacks,
  ) {
    canvas.addEventListener("mousedown", (e) => this.onDown(e));
    canvas.addEventListener("mousemove", (e) => this.onMove(e));
    canvas.addEventListener("mouseup", (e) => this.onUp(e));
    canvas.addEventListener("mouseleave", () => this.cancelDrag());
  }

  setFrame(image: HTMLImageElement): void {
    this.frame = image;
    this.canvas.width = image.naturalWidth;
    this.canvas.height = image.naturalHeight;
    this.redraw();
  }

  setDrafts(drafts: SymbolDraft[]): void {
    this.drafts = [...drafts];
    this.redraw();
  }

  getDrafts(): SymbolDraft[] {
    return [...this.drafts];
  }

  clear(): void {
    this.drafts = [];
    this.redraw();
  }

  undo(): void {
    this.drafts.pop();
    this.redraw();
  }

  private pos(e: MouseEvent): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    const x = ((e.clientX - rect.left) / rect.width) * this.canvas.width;
    const y = ((e.clientY - rect.top) / rect.height) * this.canvas.height;
    return [Math.round(x), Math.round(y)];
  }

  private onDown(e: MouseEvent): void {
    this.dragStart = this.pos(e);
    this.dragCurrent = this.dragStart;
  }

  private onMove(e: MouseEvent): void {
    if (!this.dragStart) return;
    this.dragCurrent = this.pos(e);
    this.redraw();
  }

  private cancelDrag(): void {
    this.dragStart = null;
    this.dragCurrent = null;
    this.redraw();
  }

  private onUp(e: MouseEvent): void {
    if (!this.dragStart) return;
    const [sx, sy] = this.dragStart;
    const [ex, ey] = this.pos(e);
    this.dragStart = null;
    this.dragCurrent = null;
    const draft = finishDrag(this.tool, sx, sy, ex, ey);
    const problems = draftProblems(draft, this.canvas.width, this.canvas.height);
    if (problems.length > 0) {
      this.callbacks.onRejected(problems.map((p) => p.message));
      this.redraw();
      return;
    }
    this.drafts.push(draft);
    this.callbacks.onDraft(draft);
    this.redraw();
  }

  redraw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (this.frame) ctx.drawImage(this.frame, 0, 0);
    for (const draft of this.drafts) drawDraft(ctx, draft, this.style);
    if (this.dragStart && this.dragCurrent && !CLICK_KINDS.has(this.tool.kind)) {
      const ghost = finishDrag(
        this.tool,
        this.dragStart[0],
        this.dragStart[1],
        this.dragCurrent[0],
        this.dragCurrent[1],
      );
      ctx.globalAlpha = 0.6;
      drawDraft(ctx, ghost, this.style);
      ctx.globalAlpha = 1.0;
    }
  }
}

export function drawDraft(
  ctx: CanvasRenderingContext2D,
  draft: SymbolDraft,
  style: GlyphStyle,
): void {
  switch (draft.kind) {
    case "straight_arrow":
      return drawArrow(ctx, draft, style);
    case "semi_circular_arrow":
      return drawRotation(ctx, draft, style);
    case "dual_crosshairs":
      return drawDual(ctx, draft, style);
    case "crosshair":
      return drawCrosshair(ctx, draft.start, style);
    case "gripper_state":
      return drawBadge(ctx, draft, style);
    case "prohibition":
      return drawProhibition(ctx, draft, style);
    case "rewind":
      return drawRewind(ctx, draft, style);
  }
}

function drawArrowHead(
  ctx: CanvasRenderingContext2D,
  tip: [number, number],
  direction: [number, number],
  length: number,
  color: string,
): void {
  const [ux, uy] = direction;
  const bx = tip[0] - ux * length;
  const by = tip[1] - uy * length;
  const half = length * 0.6;
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.moveTo(tip[0], tip[1]);
  ctx.lineTo(bx - uy * half, by + ux * half);
  ctx.lineTo(bx + uy * half, by - ux * half);
  ctx.closePath();
  ctx.fill();
}

function drawArrow(ctx: CanvasRenderingContext2D, draft: SymbolDraft, style: GlyphStyle): void {
  if (!draft.end || !draft.color) return;
  const color = cssRgb(axisRgb(style, draft.color));
  ctx.strokeStyle = color;
  ctx.lineWidth = style.line_width;
  ctx.setLineDash([]);
  ctx.beginPath();
  ctx.moveTo(draft.start[0], draft.start[1]);
  ctx.lineTo(draft.end[0], draft.end[1]);
  ctx.stroke();
  const dx = draft.end[0] - draft.start[0];
  const dy = draft.end[1] - draft.start[1];
  const norm = Math.hypot(dx, dy) || 1;
  drawArrowHead(ctx, draft.end, [dx / norm, dy / norm], style.arrow_head_len, color);
}

function drawRotation(ctx: CanvasRenderingContext2D, draft: SymbolDraft, style: GlyphStyle): void {
  const [x, y] = draft.start;
  // arc radius leaves room for the arrowhead, matching the server renderer
  const r = style.glyph_radius - 8;
  const color = cssRgb(style.marker_rgb);
  ctx.strokeStyle = color;
  ctx.lineWidth = style.line_width;
  ctx.setLineDash([]);
  ctx.beginPath();
  // same 270-degree arc as the server: top of the circle round to its left point
  ctx.arc(x, y, r, -Math.PI / 2, Math.PI, false);
  ctx.stroke();
  if (draft.rotationDir === "clockwise") {
    drawArrowHead(ctx, [x - r, y], [0, -1], style.arrow_head_len, color);
  } else {
    drawArrowHead(ctx, [x, y - r], [-1, 0], style.arrow_head_len, color);
  }
}

function drawCrosshair(
  ctx: CanvasRenderingContext2D,
  center: [number, number],
  style: GlyphStyle,
): void {
  const [x, y] = center;
  const r = style.glyph_radius;
  const inner = Math.floor((r * 2) / 3);
  ctx.strokeStyle = cssRgb(style.marker_rgb);
  ctx.lineWidth = style.line_width;
  ctx.setLineDash([]);
  ctx.beginPath();
  ctx.arc(x, y, inner, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.beginPath();
  ctx.moveTo(x - r, y);
  ctx.lineTo(x + r, y);
  ctx.moveTo(x, y - r);
  ctx.lineTo(x, y + r);
  ctx.stroke();
}

function drawDual(ctx: CanvasRenderingContext2D, draft: SymbolDraft, style: GlyphStyle): void {
  if (!draft.end) return;
  ctx.strokeStyle = cssRgb(style.marker_rgb);
  ctx.lineWidth = style.line_width;
  ctx.setLineDash([style.dash_on, style.dash_off]);
  ctx.beginPath();
  ctx.moveTo(draft.start[0], draft.start[1]);
  ctx.lineTo(draft.end[0], draft.end[1]);
  ctx.stroke();
  ctx.setLineDash([]);
  drawCrosshair(ctx, draft.start, style);
  drawCrosshair(ctx, draft.end, style);
}

function drawBadge(ctx: CanvasRenderingContext2D, draft: SymbolDraft, style: GlyphStyle): void {
  const [x, y] = draft.start;
  const on = draft.gripperState === "on";
  ctx.fillStyle = cssRgb(on ? style.on_fill : style.off_fill);
  ctx.strokeStyle = cssRgb(style.text_rgb);
  ctx.lineWidth = 1;
  ctx.fillRect(x - style.badge_half_w, y - style.badge_half_h, style.badge_half_w * 2, style.badge_half_h * 2);
  ctx.strokeRect(x - style.badge_half_w, y - style.badge_half_h, style.badge_half_w * 2, style.badge_half_h * 2);
  ctx.fillStyle = cssRgb(style.text_rgb);
  ctx.font = "11px sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  ctx.fillText(on ? "ON" : "OFF", x, y);
}

function drawProhibition(
  ctx: CanvasRenderingContext2D,
  draft: SymbolDraft,
  style: GlyphStyle,
): void {
  const [x, y] = draft.start;
  const r = style.glyph_radius;
  const off = Math.round(r / Math.SQRT2);
  ctx.strokeStyle = cssRgb(style.prohibition_rgb);
  ctx.lineWidth = style.line_width + 1;
  ctx.setLineDash([]);
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.beginPath();
  ctx.moveTo(x - off, y - off);
  ctx.lineTo(x + off, y + off);
  ctx.stroke();
}

function drawRewind(ctx: CanvasRenderingContext2D, draft: SymbolDraft, style: GlyphStyle): void {
  const [x, y] = draft.start;
  const r = style.glyph_radius;
  const h = Math.floor(r / 2);
  ctx.fillStyle = cssRgb(style.rewind_rgb);
  for (const tipX of [x - r + 2, x]) {
    ctx.beginPath();
    ctx.moveTo(tipX, y);
    ctx.lineTo(tipX + h, y - h);
    ctx.lineTo(tipX + h, y + h);
    ctx.closePath();
    ctx.fill();
  }
}
