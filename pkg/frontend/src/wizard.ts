// Fairness-principle wizard: one card per principle with a plain-language
// explanation, input validation, and the config-update request for the
// service. Live sessions change principle only through an approved
// contestation decision, so the wizard's output feeds session setup.

import type { PrinciplePayload } from "./types.js";

export interface WizardSelection {
  kind: "equity" | "equality" | "need";
  needs?: { H: number; P: number };
  investments?: { H: number; P: number };
}

export const PRINCIPLE_EXPLANATIONS: Record<WizardSelection["kind"], string> = {
  equality:
    "The outcome should be comparable for both parties, regardless of what " +
    "each has invested or needs: aim for deals near the equal-utility diagonal.",
  equity:
    "The outcome should be proportional to what each party has invested, " +
    "financially or otherwise. Think of a business deal: it is fair to pay " +
    "the market value of what was put in, not more and not less.",
  need:
    "The party in greater need receives the larger share. If one side has a " +
    "whole family to feed and is poor, it is fair that most of the goods go " +
    "to them; the balanced-needs line marks those outcomes.",
};

export interface WizardResult {
  errors: Record<string, string>;
  request: { active_principle: PrinciplePayload } | null;
}

export function principleWizard(selection: WizardSelection): WizardResult {
  const errors: Record<string, string> = {};

  if (selection.kind === "need") {
    const needs = selection.needs;
    if (!needs) {
      errors.needs = "needs principle requires per-party needs";
    } else {
      if (needs.H <= 0 || needs.P <= 0) {
        errors.needs = "needs must be strictly positive";
      } else if (Math.abs(needs.H + needs.P - 1) > 1e-9) {
        errors.needs = "needs must sum to 1";
      }
    }
  }
  if (selection.kind === "equity") {
    const inv = selection.investments;
    if (!inv) {
      errors.investments = "equity principle requires per-party investments";
    } else if (inv.H <= 0 || inv.P <= 0) {
      errors.investments = "investments must be strictly positive";
    }
  }
  if (Object.keys(errors).length > 0) {
    return { errors, request: null };
  }

  const principle: PrinciplePayload = { kind: selection.kind };
  if (selection.kind === "need" && selection.needs) {
    principle.needs = { needs: selection.needs };
  }
  if (selection.kind === "equity" && selection.investments) {
    principle.investments = selection.investments;
  }
  return { errors: {}, request: { active_principle: principle } };
}
