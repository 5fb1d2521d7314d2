// Wire types for the session service. Field names mirror the server payloads
// exactly; the UI never re-derives any of these numbers.

export type Party = "H" | "P";

export type BidAssignment = Record<string, string>;

export interface PointPayload {
  u_H: number;
  u_P: number;
  bid: BidAssignment | null;
  index: number | null;
}

export interface DeviationPayload extends PointPayload {
  deviation: number;
}

export interface RayPayload {
  direction: [number, number];
  label: string;
}

export interface AnalyticsReport {
  points: PointPayload[];
  frontier: PointPayload[];
  egalitarian_point: PointPayload;
  leo: PointPayload[];
  lbn_direction: RayPayload;
  lbn_points: PointPayload[];
  ks_point: PointPayload;
  per_bid_deviations: DeviationPayload[];
  principle: PrinciplePayload;
  transformed_view: boolean;
  resolution: number;
  opponent_estimate: Record<string, unknown>;
  judgments: unknown[];
  config_digest: string;
}

export interface NeedsPayload {
  needs: { H: number; P: number };
  investments?: { H: number; P: number };
}

export interface PrinciplePayload {
  kind: "equity" | "equality" | "need";
  needs?: NeedsPayload;
  investments?: { H: number; P: number };
}

export interface TranscriptEntryPayload {
  round: number;
  party: Party;
  action: "offer" | "accept" | "end";
  bid?: BidAssignment;
  u_H?: number;
  u_P_est?: number;
  timestamp: number;
}

export interface ExplanationPayload {
  metric: string;
  observed: unknown;
  threshold: unknown;
}

export interface AberrationPayload {
  kind: string;
  evidence: number[];
  explanation: ExplanationPayload;
  informational: boolean;
}

export interface ProposalPayload {
  id: string;
  kind: string;
  payload: Record<string, unknown>;
  aberration: AberrationPayload;
  status: "pending" | "approved" | "rejected";
}

export interface MonitorReportPayload {
  entry_index: number;
  round: number;
  party: Party;
  bid: string[];
  u_H: number;
  u_P_est: number;
  deviation: number;
  distance_leo: number;
  distance_lbn: number;
  config_digest: string;
}

export interface SessionStatePayload {
  id: string;
  status: "open" | "agreed" | "failed";
  round: number;
  turn: Party | null;
  deadline_rounds: number;
  transcript: TranscriptEntryPayload[];
  analytics: AnalyticsReport;
  reports: MonitorReportPayload[];
  aberrations: AberrationPayload[];
  pending_proposals: ProposalPayload[];
  outcome?: {
    result: string;
    bid: string[] | null;
    point: { u_H: number; u_P: number } | null;
    rounds_used: number;
  };
}

export interface DecisionResponse {
  entry: {
    timestamp: number;
    proposal_id: string;
    kind: string;
    decision: "approve" | "reject";
    rationale: string;
    decided_by: string;
    config_digest: string;
  };
  state: SessionStatePayload;
}

export interface StreamEvent {
  event: string;
  data: Record<string, unknown>;
}
