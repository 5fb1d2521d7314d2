// Paired utility bars for the drafted (or standing) offer: the two parties'
// utilities side by side, colored by which party the draft favours. All
// numbers come from the server's per-bid deviation table.

import type { AnalyticsReport, BidAssignment } from "./types.js";
import type { SessionView } from "./view.js";

export interface OfferBars {
  u_H: number;
  u_P: number;
  deviation: number;
  favours: "H" | "P" | "even";
}

export interface BarsRender {
  bars: OfferBars | null; // null: no draft, component hidden
  svg: string;
}

function sameBid(a: BidAssignment, b: BidAssignment): boolean {
  const keysA = Object.keys(a);
  const keysB = Object.keys(b);
  return (
    keysA.length === keysB.length && keysA.every((k) => a[k] === b[k])
  );
}

export function lookupBid(
  analytics: AnalyticsReport,
  drafted: BidAssignment,
): OfferBars | null {
  for (const row of analytics.per_bid_deviations) {
    if (row.bid !== null && sameBid(row.bid, drafted)) {
      const favours = row.u_H === row.u_P ? "even" : row.u_H > row.u_P ? "H" : "P";
      return { u_H: row.u_H, u_P: row.u_P, deviation: row.deviation, favours };
    }
  }
  return null;
}

export function renderOfferComparison(
  view: SessionView,
  drafted: BidAssignment | null,
): BarsRender {
  if (drafted === null || view.analytics === null) {
    return { bars: null, svg: "" };
  }
  const bars = lookupBid(view.analytics, drafted);
  if (bars === null) {
    return { bars: null, svg: "" };
  }
  const width = 220;
  const scale = (u: number) => Math.round(u * (width - 70));
  const color = bars.favours === "even" ? "#888" : bars.favours === "H" ? "#c33" : "#36c";
  const svg = [
    `<svg viewBox="0 0 ${width} 64" xmlns="http://www.w3.org/2000/svg" class="offer-bars">`,
    `<text x="0" y="18" font-size="11">you</text>`,
    `<rect x="46" y="8" width="${scale(bars.u_H)}" height="12" fill="${color}" class="bar-h" data-value="${bars.u_H}"/>`,
    `<text x="0" y="44" font-size="11">them</text>`,
    `<rect x="46" y="34" width="${scale(bars.u_P)}" height="12" fill="${color}" opacity="0.6" class="bar-p" data-value="${bars.u_P}"/>`,
    `<text x="46" y="60" font-size="9">deviation ${bars.deviation.toFixed(3)}</text>`,
    "</svg>",
  ].join("");
  return { bars, svg };
}
