// Contestation dialog logic: shows the aberration's evidence (as links into
// the transcript) and its structured explanation, takes a mandatory rationale,
// and submits exactly one decision. No optimistic updates: the pending list
// only changes after the server acknowledges.

import type { ApiClient } from "./api.js";
import type { ProposalPayload } from "./types.js";
import type { SessionView } from "./view.js";

export interface EvidenceLink {
  entryIndex: number;
  round: number | null;
  party: string | null;
  bid: Record<string, string> | null;
}

export function evidenceLinks(view: SessionView, proposal: ProposalPayload): EvidenceLink[] {
  return proposal.aberration.evidence.map((entryIndex) => {
    const entry = view.transcript[entryIndex];
    return {
      entryIndex,
      round: entry ? entry.round : null,
      party: entry ? entry.party : null,
      bid: entry?.bid ?? null,
    };
  });
}

export class ContestationDialog {
  private submitting = false;
  private settled = false;

  constructor(
    private readonly api: ApiClient,
    private readonly view: SessionView,
    readonly proposal: ProposalPayload,
  ) {}

  get evidence(): EvidenceLink[] {
    return evidenceLinks(this.view, this.proposal);
  }

  get explanation() {
    return this.proposal.aberration.explanation;
  }

  get busy(): boolean {
    return this.submitting;
  }

  validate(rationale: string): string | null {
    if (rationale.trim().length === 0) {
      return "a rationale is required for every decision";
    }
    return null;
  }

  async submit(
    decision: "approve" | "reject",
    rationale: string,
    payload?: Record<string, unknown>,
  ): Promise<void> {
    const problem = this.validate(rationale);
    if (problem !== null) {
      throw new Error(problem);
    }
    if (this.submitting || this.settled) {
      throw new Error("decision already submitted");
    }
    this.submitting = true;
    try {
      const response = await this.api.postDecision(
        this.proposal.id,
        decision,
        rationale,
        payload,
      );
      // server ack arrived: now (and only now) drop it from the pending list
      this.settled = true;
      this.view.settleDecision(this.proposal.id);
      this.view.applySnapshot(response.state);
    } finally {
      this.submitting = false;
    }
  }
}
