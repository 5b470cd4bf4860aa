/**
 * Typed client for the assessment HTTP API.
 *
 * Every mutating call carries a caller-supplied idempotency key (eventId),
 * so a retried or double-fired request is recorded server-side exactly once.
 */

export interface ScenarioView {
  id: string;
  prompt: string;
  options: string[];
  has_follow_up: boolean;
  follow_up_template?: string;
  progress: { scenarios_seen: number; max_scenarios: number };
}

export interface TraitCell {
  value: number;
  confidence: number;
  flagged?: boolean;
}

export type DisplayProfile = Record<string, TraitCell>;

export interface CreateResponse {
  session_id: string;
  scenario: ScenarioView;
}

export interface ChoiceResponse {
  profile: DisplayProfile;
  done: boolean;
  scenario: ScenarioView | null;
}

export interface ProfileResponse {
  profile: DisplayProfile;
  done: boolean;
  final: DisplayProfile | null;
  core: Record<string, number> | null;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    } catch {
      /* body not json */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class AssessmentApi {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  createSession(): Promise<CreateResponse> {
    return this.fetchFn(`${this.baseUrl}/assessments`, { method: "POST" }).then(
      (r) => parseOrThrow<CreateResponse>(r),
    );
  }

  postChoice(
    sessionId: string,
    optionIndex: number,
    freeText: string | null,
    eventId: string,
  ): Promise<ChoiceResponse> {
    return this.fetchFn(`${this.baseUrl}/assessments/${sessionId}/choice`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        option_index: optionIndex,
        free_text: freeText,
        event_id: eventId,
      }),
    }).then((r) => parseOrThrow<ChoiceResponse>(r));
  }

  getProfile(sessionId: string): Promise<ProfileResponse> {
    return this.fetchFn(`${this.baseUrl}/assessments/${sessionId}/profile`).then(
      (r) => parseOrThrow<ProfileResponse>(r),
    );
  }
}
