/**
 * Glyph geometry and palette.
 *
 * The server is the source of truth (`GET /style`); these defaults mirror it
 * so previews render before the style document loads.  The preview and the
 * server-side render share every footprint constant, which is what keeps
 * client bounding boxes within a pixel of the authoritative ones.
 */

export type Rgb = [number, number, number];

export interface GlyphStyle {
  primary: number;
  secondary: number;
  line_width: number;
  glyph_radius: number;
  arrow_head_len: number;
  dash_on: number;
  dash_off: number;
  badge_half_w: number;
  badge_half_h: number;
  marker_rgb: Rgb;
  on_fill: Rgb;
  off_fill: Rgb;
  prohibition_rgb: Rgb;
  rewind_rgb: Rgb;
  text_rgb: Rgb;
}

export const DEFAULT_STYLE: GlyphStyle = {
  primary: 224,
  secondary: 32,
  line_width: 3,
  glyph_radius: 24,
  arrow_head_len: 12,
  dash_on: 6,
  dash_off: 5,
  badge_half_w: 24,
  badge_half_h: 12,
  marker_rgb: [224, 224, 32],
  on_fill: [32, 144, 64],
  off_fill: [176, 96, 32],
  prohibition_rgb: [224, 32, 32],
  rewind_rgb: [32, 96, 224],
  text_rgb: [255, 255, 255],
};

export function axisRgb(style: GlyphStyle, color: "red" | "green" | "blue"): Rgb {
  const p = style.primary;
  const s = style.secondary;
  if (color === "red") return [p, s, s];
  if (color === "green") return [s, p, s];
  return [s, s, p];
}

export function cssRgb(rgb: Rgb): string {
  return `rgb(${rgb[0]}, ${rgb[1]}, ${rgb[2]})`;
}
