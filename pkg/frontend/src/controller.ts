/**
 * Session controller: drives one assessment against the API, independent of
 * the DOM so the whole flow is testable headlessly.
 *
 * Submission rules: one server event per user action. A submit while another
 * is in flight is ignored; a retry after a network failure reuses the same
 * idempotency key so the server never records the action twice.
 */

import { ApiError, AssessmentApi } from "./api.js";
import type { ChoiceResponse, ProfileResponse } from "./api.js";
import { UISessionView, fromChoice, fromCreate } from "./state.js";

export type IdGenerator = () => string;

function defaultIdGenerator(): string {
  return `evt-${Date.now().toString(36)}-${Math.random().toString(36).slice(2, 10)}`;
}

export class SessionController {
  view: UISessionView | null = null;
  inFlight = false;
  lastError: string | null = null;
  private pendingEventId: string | null = null;
  private listeners: Array<(view: UISessionView) => void> = [];

  constructor(
    private api: AssessmentApi,
    private nextEventId: IdGenerator = defaultIdGenerator,
  ) {}

  onChange(listener: (view: UISessionView) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    if (this.view) {
      for (const listener of this.listeners) listener(this.view);
    }
  }

  async start(): Promise<UISessionView> {
    const created = await this.api.createSession();
    this.view = fromCreate(created);
    this.emit();
    return this.view;
  }

  /**
   * Submit the chosen option (plus optional free text). Returns the new view,
   * or null when the submit was suppressed (already in flight / done).
   */
  async submit(optionIndex: number, freeText: string | null): Promise<UISessionView | null> {
    if (!this.view || this.view.done || this.inFlight) return null;
    // Reuse the pending key when retrying a failed submit; mint otherwise.
    const eventId = this.pendingEventId ?? this.nextEventId();
    this.pendingEventId = eventId;
    this.inFlight = true;
    this.lastError = null;
    try {
      const response: ChoiceResponse = await this.api.postChoice(
        this.view.sessionId,
        optionIndex,
        freeText,
        eventId,
      );
      this.view = fromChoice(this.view, response);
      this.pendingEventId = null;
      this.emit();
      return this.view;
    } catch (error) {
      if (error instanceof ApiError && error.status === 422) {
        // Validation errors are terminal for this event: surface inline.
        this.pendingEventId = null;
        this.lastError = error.detail;
      } else {
        // Network-style failure: keep the event id for an idempotent retry.
        this.lastError = error instanceof Error ? error.message : String(error);
      }
      return null;
    } finally {
      this.inFlight = false;
    }
  }

  async finalProfile(): Promise<ProfileResponse> {
    if (!this.view) throw new Error("no active session");
    return this.api.getProfile(this.view.sessionId);
  }
}
