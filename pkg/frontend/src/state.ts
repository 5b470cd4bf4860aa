/**
 * UI session state: a pure function of the last server response.
 *
 * The client performs no trait math of its own; everything rendered comes
 * verbatim from the server's profile payloads.
 */

import type { ChoiceResponse, CreateResponse, DisplayProfile, ScenarioView } from "./api.js";

export const TRAIT_ORDER = [
  "openness",
  "conscientiousness",
  "extraversion",
  "agreeableness",
  "neuroticism",
] as const;

export interface UISessionView {
  sessionId: string;
  scenario: ScenarioView | null;
  profile: DisplayProfile | null;
  progress: { seen: number; max: number };
  done: boolean;
}

export function fromCreate(response: CreateResponse): UISessionView {
  return {
    sessionId: response.session_id,
    scenario: response.scenario,
    profile: null,
    progress: {
      seen: response.scenario.progress.scenarios_seen,
      max: response.scenario.progress.max_scenarios,
    },
    done: false,
  };
}

export function fromChoice(previous: UISessionView, response: ChoiceResponse): UISessionView {
  return {
    sessionId: previous.sessionId,
    scenario: response.scenario,
    profile: response.profile,
    progress: response.scenario
      ? {
          seen: response.scenario.progress.scenarios_seen,
          max: response.scenario.progress.max_scenarios,
        }
      : { seen: previous.progress.max, max: previous.progress.max },
    done: response.done,
  };
}

/** Profile values in the fixed O-C-E-A-N axis order. */
export function orderedTraits(profile: DisplayProfile) {
  return TRAIT_ORDER.map((trait) => ({ trait, ...profile[trait] }));
}
