// Browser wiring: mounts the bid-space scatter, the offer comparison bars,
// the principle wizard, and the contestation list against a running service,
// kept fresh by a single event-stream subscription per session.

import { ApiClient, SseParser } from "./api.js";
import { renderOfferComparison } from "./bars.js";
import { ContestationDialog, evidenceLinks } from "./contest.js";
import { renderBidSpace } from "./scatter.js";
import type { BidAssignment, Party } from "./types.js";
import { SessionView } from "./view.js";
import { PRINCIPLE_EXPLANATIONS } from "./wizard.js";

const api = new ApiClient("", (url, init) => fetch(url, init));
const view = new SessionView();

let sessionId: string | null = null;
let draftedBid: BidAssignment | null = null;
let transformedView = false;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function refresh(): Promise<void> {
  if (!sessionId) return;
  const state = await api.getSession(sessionId, transformedView ? "transformed" : undefined);
  view.applySnapshot(state);
  paint();
}

function paint(): void {
  if (!view.analytics) return;
  const scatter = renderBidSpace(view);
  el("scatter").innerHTML = scatter.svg;
  el("status").textContent =
    `${view.status} | round ${view.round}/${view.deadlineRounds}` +
    (view.turn ? ` | ${view.turn} to move` : "") +
    (scatter.stale ? " | refreshing…" : "");

  const bars = renderOfferComparison(view, draftedBid);
  const barsHost = el("bars");
  barsHost.innerHTML = bars.svg;
  barsHost.style.display = bars.bars === null ? "none" : "block";

  const list = el("proposals");
  list.innerHTML = "";
  for (const proposal of view.pendingProposals) {
    const item = document.createElement("li");
    const links = evidenceLinks(view, proposal)
      .map((link) => `round ${link.round} (${link.party})`)
      .join(", ");
    const explanation = proposal.aberration.explanation;
    item.innerHTML =
      `<b>${proposal.kind}</b> after ${proposal.aberration.kind}` +
      ` <small>[${explanation.metric} = ${JSON.stringify(explanation.observed)}` +
      ` vs ${JSON.stringify(explanation.threshold)}; evidence: ${links}]</small> ` +
      `<input placeholder="rationale (required)" size="28"/>` +
      `<button data-d="approve">approve</button>` +
      `<button data-d="reject">reject</button>`;
    const input = item.querySelector("input") as HTMLInputElement;
    for (const button of item.querySelectorAll("button")) {
      button.addEventListener("click", async () => {
        const dialog = new ContestationDialog(api, view, proposal);
        const problem = dialog.validate(input.value);
        if (problem) {
          input.setCustomValidity(problem);
          input.reportValidity();
          return;
        }
        for (const b of item.querySelectorAll("button")) b.setAttribute("disabled", "");
        await dialog.submit(button.getAttribute("data-d") as "approve" | "reject", input.value);
        paint();
      });
    }
    list.appendChild(item);
  }

  const transcript = el("transcript");
  transcript.textContent = view.transcript
    .map((entry) => {
      const bid = entry.bid ? JSON.stringify(entry.bid) : "";
      return `r${entry.round} ${entry.party} ${entry.action} ${bid}`;
    })
    .join("\n");
}

async function subscribe(): Promise<void> {
  if (!sessionId) return;
  const response = await fetch(`/sessions/${sessionId}/events`);
  const reader = response.body?.getReader();
  if (!reader) return;
  const parser = new SseParser();
  const decoder = new TextDecoder();
  for (;;) {
    const { done, value } = await reader.read();
    if (done) break;
    for (const event of parser.push(decoder.decode(value))) {
      if (event.event === "stream_end") return;
      view.applyEvent(event);
    }
    if (view.stale) await refresh();
    else paint();
  }
}

function wizardPanel(): void {
  const host = el("wizard");
  host.innerHTML = Object.entries(PRINCIPLE_EXPLANATIONS)
    .map(
      ([kind, text]) =>
        `<label><input type="radio" name="principle" value="${kind}"/> <b>${kind}</b>: ${text}</label>`,
    )
    .join("<br/>");
}

async function main(): Promise<void> {
  wizardPanel();
  el("join").addEventListener("click", async () => {
    sessionId = (el("session-id") as HTMLInputElement).value.trim();
    await refresh();
    void subscribe();
  });
  el("toggle-transform").addEventListener("click", async () => {
    transformedView = !transformedView;
    await refresh();
  });
  el("offer").addEventListener("click", async () => {
    if (!sessionId || !draftedBid) return;
    const party = (el("party") as HTMLSelectElement).value as Party;
    await api.postAction(sessionId, party, { kind: "offer", bid: draftedBid });
    await refresh();
  });
  el("draft").addEventListener("input", (event) => {
    try {
      draftedBid = JSON.parse((event.target as HTMLInputElement).value);
    } catch {
      draftedBid = null;
    }
    paint();
  });
}

main().catch((error) => {
  el("status").textContent = String(error);
});
