import { describe, expect, it } from "vitest";

import { isRegularPentagon, radarPoints, renderConfidenceBars, renderRadarSvg } from "../src/radar.js";
import { TRAIT_ORDER } from "../src/state.js";

function profileOf(values: number[], confidence = 1.5) {
  return Object.fromEntries(
    TRAIT_ORDER.map((t, i) => [t, { value: values[i], confidence }]),
  );
}

describe("radar geometry", () => {
  it("places vertices at the profile's radius fractions", () => {
    const values = [52, 83, 32, 70, 42];
    const points = radarPoints(profileOf(values), 0, 0, 100);
    points.forEach((p, i) => {
      expect(Math.hypot(p.x, p.y)).toBeCloseTo(values[i], 9);
      expect(p.value).toBe(values[i]);
    });
  });

  it("renders a regular pentagon when all values are 50", () => {
    const points = radarPoints(profileOf([50, 50, 50, 50, 50]), 160, 160, 120);
    expect(isRegularPentagon(points, 160, 160)).toBe(true);
  });

  it("is not regular for an uneven profile", () => {
    const points = radarPoints(profileOf([52, 83, 32, 70, 42]), 160, 160, 120);
    expect(isRegularPentagon(points, 160, 160)).toBe(false);
  });

  it("flags zero-confidence axes in the svg and bars", () => {
    const profile = profileOf([50, 50, 50, 50, 50]);
    profile.extraversion = { value: 50, confidence: 0, flagged: true };
    const svg = renderRadarSvg(profile);
    expect(svg).toContain('class="vertex flagged"');
    const bars = renderConfidenceBars(profile);
    expect(bars).toContain('conf-row flagged" data-trait="extraversion"');
  });

  it("embeds each trait value in the svg vertices", () => {
    const values = [52, 83, 32, 70, 42];
    const svg = renderRadarSvg(profileOf(values));
    TRAIT_ORDER.forEach((trait, i) => {
      expect(svg).toContain(`data-trait="${trait}" data-value="${values[i]}"`);
    });
  });
});
