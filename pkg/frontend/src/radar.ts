/**
 * Radar geometry for the five-trait profile, axes fixed O-C-E-A-N starting
 * at 12 o'clock and proceeding clockwise. Pure math in, SVG strings out.
 */

import type { DisplayProfile } from "./api.js";
import { TRAIT_ORDER, orderedTraits } from "./state.js";

export interface RadarPoint {
  trait: string;
  x: number;
  y: number;
  value: number;
  confidence: number;
  flagged: boolean;
}

export function axisAngle(index: number): number {
  // 5 axes, starting straight up.
  return -Math.PI / 2 + (index * 2 * Math.PI) / TRAIT_ORDER.length;
}

export function radarPoints(
  profile: DisplayProfile,
  cx: number,
  cy: number,
  radius: number,
): RadarPoint[] {
  return orderedTraits(profile).map((cell, index) => {
    const angle = axisAngle(index);
    const reach = (cell.value / 100) * radius;
    return {
      trait: cell.trait,
      x: cx + reach * Math.cos(angle),
      y: cy + reach * Math.sin(angle),
      value: cell.value,
      confidence: cell.confidence,
      flagged: Boolean(cell.flagged) || cell.confidence === 0,
    };
  });
}

export function polygonPath(points: RadarPoint[]): string {
  return points.map((p) => `${p.x.toFixed(2)},${p.y.toFixed(2)}`).join(" ");
}

/** True when all five vertices are equidistant from the center (regular pentagon). */
export function isRegularPentagon(points: RadarPoint[], cx: number, cy: number): boolean {
  const radii = points.map((p) => Math.hypot(p.x - cx, p.y - cy));
  return radii.every((r) => Math.abs(r - radii[0]) < 1e-9);
}

export function renderRadarSvg(profile: DisplayProfile, size = 320): string {
  const cx = size / 2;
  const cy = size / 2;
  const radius = size * 0.38;
  const points = radarPoints(profile, cx, cy, radius);
  const rings = [0.25, 0.5, 0.75, 1.0]
    .map((f) => {
      const ring = TRAIT_ORDER.map((_, i) => {
        const a = axisAngle(i);
        return `${(cx + f * radius * Math.cos(a)).toFixed(2)},${(cy + f * radius * Math.sin(a)).toFixed(2)}`;
      }).join(" ");
      return `<polygon class="ring" points="${ring}" />`;
    })
    .join("");
  const axes = points
    .map((p, i) => {
      const a = axisAngle(i);
      const ex = cx + radius * Math.cos(a);
      const ey = cy + radius * Math.sin(a);
      const lx = cx + (radius + 18) * Math.cos(a);
      const ly = cy + (radius + 18) * Math.sin(a);
      const cls = p.flagged ? "axis-label flagged" : "axis-label";
      const label = p.trait.slice(0, 1).toUpperCase();
      return (
        `<line class="axis" x1="${cx}" y1="${cy}" x2="${ex.toFixed(2)}" y2="${ey.toFixed(2)}" />` +
        `<text class="${cls}" x="${lx.toFixed(2)}" y="${ly.toFixed(2)}" text-anchor="middle">` +
        `${label} ${p.value}</text>`
      );
    })
    .join("");
  const vertices = points
    .map(
      (p) =>
        `<circle class="vertex${p.flagged ? " flagged" : ""}" cx="${p.x.toFixed(2)}" cy="${p.y.toFixed(2)}" r="4" data-trait="${p.trait}" data-value="${p.value}" />`,
    )
    .join("");
  return (
    `<svg viewBox="0 0 ${size} ${size}" role="img" aria-label="trait radar">` +
    `${rings}${axes}<polygon class="profile" points="${polygonPath(points)}" />${vertices}</svg>`
  );
}

/** Horizontal confidence bars, one per trait in axis order. */
export function renderConfidenceBars(profile: DisplayProfile, fullScale = 1.8): string {
  return orderedTraits(profile)
    .map((cell) => {
      const width = Math.min(100, (cell.confidence / fullScale) * 100);
      const flagged = Boolean(cell.flagged) || cell.confidence === 0;
      return (
        `<div class="conf-row${flagged ? " flagged" : ""}" data-trait="${cell.trait}">` +
        `<span class="conf-label">${cell.trait}</span>` +
        `<div class="conf-track"><div class="conf-fill" style="width:${width.toFixed(1)}%"></div></div>` +
        `<span class="conf-value">${cell.confidence.toFixed(2)}</span></div>`
      );
    })
    .join("");
}
