// The two-dimensional bid-space view: every bid as a dot, the Pareto frontier
// as a polyline, the equal-opportunity members dotted, the balanced-needs ray
// dashed, and the egalitarian point starred.
//
// The scene carries the server arrays untouched (same objects, same order):
// the svg is a projection of the scene and nothing else, so a test can verify
// the rendered data equals the intercepted payload byte for byte.

import type { AnalyticsReport, PointPayload, RayPayload } from "./types.js";
import type { SessionView } from "./view.js";

export interface ScatterScene {
  points: PointPayload[];
  frontier: PointPayload[];
  leo: PointPayload[];
  lbn_direction: RayPayload;
  lbn_points: PointPayload[];
  egalitarian_point: PointPayload;
  ks_point: PointPayload;
  transformed_view: boolean;
}

export interface ScatterRender {
  scene: ScatterScene;
  svg: string;
  stale: boolean;
}

const SIZE = 480;
const PAD = 36;

function sx(u: number): number {
  return PAD + u * (SIZE - 2 * PAD);
}

function sy(u: number): number {
  return SIZE - PAD - u * (SIZE - 2 * PAD);
}

function fmt(n: number): string {
  return Number(n.toFixed(2)).toString();
}

export function renderBidSpace(view: SessionView): ScatterRender {
  const analytics = view.analytics;
  if (analytics === null) {
    throw new Error("no analytics to render yet");
  }
  const scene = sceneFrom(analytics);
  const svg = sceneSvg(scene);
  return { scene, svg, stale: view.stale };
}

export function sceneFrom(analytics: AnalyticsReport): ScatterScene {
  return {
    points: analytics.points,
    frontier: analytics.frontier,
    leo: analytics.leo,
    lbn_direction: analytics.lbn_direction,
    lbn_points: analytics.lbn_points,
    egalitarian_point: analytics.egalitarian_point,
    ks_point: analytics.ks_point,
    transformed_view: analytics.transformed_view,
  };
}

function sceneSvg(scene: ScatterScene): string {
  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${SIZE} ${SIZE}" xmlns="http://www.w3.org/2000/svg" class="bid-space">`,
  );
  parts.push(
    `<line x1="${sx(0)}" y1="${sy(0)}" x2="${sx(1)}" y2="${sy(1)}" class="diagonal" stroke="#888" stroke-width="1"/>`,
  );

  // balanced-needs ray, dashed, clipped to the unit square
  const [dx, dy] = scene.lbn_direction.direction;
  const t = Math.min(1 / dx, 1 / dy);
  parts.push(
    `<line x1="${sx(0)}" y1="${sy(0)}" x2="${sx(t * dx)}" y2="${sy(t * dy)}" ` +
      `class="lbn" stroke="green" stroke-width="1.5" stroke-dasharray="8 4"/>`,
  );

  // frontier polyline (server order: descending u_H)
  const path = scene.frontier
    .map((p) => `${sx(p.u_H)},${sy(p.u_P)}`)
    .join(" ");
  parts.push(
    `<polyline points="${path}" class="frontier" fill="none" stroke="#222" stroke-width="1.5"/>`,
  );

  for (const p of scene.points) {
    parts.push(
      `<circle cx="${sx(p.u_H)}" cy="${sy(p.u_P)}" r="4" class="bid" fill="#9aa" ` +
        `data-u-h="${p.u_H}" data-u-p="${p.u_P}" data-index="${p.index}"/>`,
    );
  }
  for (const p of scene.lbn_points) {
    parts.push(
      `<circle cx="${sx(p.u_H)}" cy="${sy(p.u_P)}" r="5" class="lbn-point" fill="green"/>`,
    );
  }
  // equal-opportunity members rendered dotted (dotted stroke ring)
  for (const p of scene.leo) {
    parts.push(
      `<circle cx="${sx(p.u_H)}" cy="${sy(p.u_P)}" r="7" class="leo-point" fill="none" ` +
        `stroke="blue" stroke-width="1.5" stroke-dasharray="2 2"/>`,
    );
  }
  const ep = scene.egalitarian_point;
  parts.push(
    `<text x="${sx(ep.u_H)}" y="${sy(ep.u_P)}" class="ep" fill="red" font-size="18" ` +
      `text-anchor="middle" dominant-baseline="middle">★</text>`,
  );
  parts.push(
    `<text x="${sx(ep.u_H) + 10}" y="${sy(ep.u_P) - 8}" class="ep-label" font-size="10">` +
      `EP (${fmt(ep.u_H)}, ${fmt(ep.u_P)})</text>`,
  );
  parts.push("</svg>");
  return parts.join("");
}
