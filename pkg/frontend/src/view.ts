// Client-side mirror of one session. Strictly read-only: every number comes
// from the server (snapshots and the event stream); nothing is recomputed
// locally. One stream subscription per open view.

import type {
  AberrationPayload,
  AnalyticsReport,
  MonitorReportPayload,
  ProposalPayload,
  SessionStatePayload,
  StreamEvent,
  TranscriptEntryPayload,
} from "./types.js";

export class SessionView {
  id = "";
  status: SessionStatePayload["status"] = "open";
  round = 0;
  turn: SessionStatePayload["turn"] = null;
  deadlineRounds = 0;
  transcript: TranscriptEntryPayload[] = [];
  analytics: AnalyticsReport | null = null;
  reports: MonitorReportPayload[] = [];
  aberrations: AberrationPayload[] = [];
  pendingProposals: ProposalPayload[] = [];
  outcome: SessionStatePayload["outcome"] | undefined;
  stale = false;

  // Replace the whole mirror from a server snapshot.
  applySnapshot(state: SessionStatePayload): void {
    this.id = state.id;
    this.status = state.status;
    this.round = state.round;
    this.turn = state.turn;
    this.deadlineRounds = state.deadline_rounds;
    this.transcript = state.transcript;
    this.analytics = state.analytics;
    this.reports = state.reports;
    this.aberrations = state.aberrations;
    this.pendingProposals = state.pending_proposals;
    this.outcome = state.outcome;
    this.stale = false;
  }

  // Fold one stream event into the mirror. Analytics are only carried by
  // snapshots, so transcript events mark the plot stale until a refresh.
  applyEvent(event: StreamEvent): void {
    switch (event.event) {
      case "transcript_entry":
        this.transcript = [...this.transcript, event.data as unknown as TranscriptEntryPayload];
        this.stale = true;
        break;
      case "monitor_report":
        this.reports = [...this.reports, event.data as unknown as MonitorReportPayload];
        break;
      case "aberration":
        this.aberrations = [...this.aberrations, event.data as unknown as AberrationPayload];
        break;
      case "proposal": {
        const proposal = event.data as unknown as ProposalPayload;
        if (proposal.status === "pending") {
          this.pendingProposals = [...this.pendingProposals, proposal];
        }
        break;
      }
      case "decision": {
        const entry = event.data as { proposal_id?: string };
        this.pendingProposals = this.pendingProposals.filter(
          (p) => p.id !== entry.proposal_id,
        );
        break;
      }
      default:
        break;
    }
  }

  settleDecision(proposalId: string): void {
    this.pendingProposals = this.pendingProposals.filter((p) => p.id !== proposalId);
  }
}
